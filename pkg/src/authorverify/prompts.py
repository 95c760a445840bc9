"""Prompt-pack loading.

A pack is a directory of ``<owner>/<phase>[.cross].txt`` files where owner is a
dimension, ``coordinator`` or ``common``. Lookup falls back from the owner to
``common`` and from the cross-language variant to the plain one.
Placeholders use :class:`string.Template` syntax (``$name``).
"""

from __future__ import annotations

import os
from functools import lru_cache
from pathlib import Path
from string import Template

from .errors import RegistryError

BUILTIN_PACK = Path(__file__).with_name("prompts")


class PromptPack:
    def __init__(self, root=None):
        self.root = Path(root) if root else BUILTIN_PACK
        if not self.root.is_dir():
            raise RegistryError(f"prompt pack directory not found: {self.root}")

    def _candidates(self, owner: str, phase: str, cross: bool):
        names = [f"{phase}.cross.txt", f"{phase}.txt"] if cross else [f"{phase}.txt"]
        for name in names:
            yield self.root / owner / name
            yield self.root / "common" / name

    @lru_cache(maxsize=None)
    def template(self, owner: str, phase: str, cross: bool = False) -> Template:
        for path in self._candidates(owner, phase, cross):
            if path.is_file():
                return Template(path.read_text(encoding="utf-8"))
        raise RegistryError(f"no prompt for owner={owner!r} phase={phase!r} cross={cross}")

    def render(self, owner: str, phase: str, cross: bool = False, **values) -> str:
        return self.template(owner, phase, cross).safe_substitute(**values).strip() + "\n"

    def __hash__(self):
        return hash(os.fspath(self.root))

    def __eq__(self, other):
        return isinstance(other, PromptPack) and self.root == other.root


_DEFAULT = None


def default_pack() -> PromptPack:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = PromptPack()
    return _DEFAULT
