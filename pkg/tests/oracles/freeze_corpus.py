"""Regenerate tests/fixtures/corpus_profiles.json from the reference oracle.

Run from the repository root: ``python3 -m tests.oracles.freeze_corpus``.
"""

import json
from pathlib import Path

from authorverify.stylometry.tokenizer import CodeSample

from .stylometry_oracle import oracle_profiles

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main():
    out = {}
    for path in sorted((FIXTURES / "corpus").iterdir()):
        sample = CodeSample.from_path(path)
        out[path.name] = {"language": sample.language.value, "profiles": oracle_profiles(sample.text, sample.language)}
    (FIXTURES / "corpus_profiles.json").write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
