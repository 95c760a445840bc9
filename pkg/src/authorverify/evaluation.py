"""Pair sampling, binary metrics, expert consensus and ablation runs."""

from __future__ import annotations

import hashlib
import itertools
import json
import random
import re
from collections.abc import Callable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .coordinator.config import EngineConfig
from .coordinator.engine import MODES, binary_label, verify_pair
from .errors import ContractError, DatasetError
from .experts import ExpertReport
from .llm.backends import Backend
from .pair import CodePair
from .stylometry.languages import Language
from .stylometry.profiles import DIMENSIONS
from .stylometry.tokenizer import CodeSample

TIERS = ("same_language", "cross_low", "cross_medium", "cross_high", "cross_mixed")
TIER_TABLE = {
    frozenset(("c", "cpp")): "cross_low",
    frozenset(("c", "csharp")): "cross_low",
    frozenset(("java", "go")): "cross_medium",
    frozenset(("python", "ruby")): "cross_medium",
    frozenset(("cpp", "python")): "cross_high",
    frozenset(("java", "haskell")): "cross_high",
}
MIXED_LANGUAGES = ("python", "java", "go", "cpp")

_AUTHOR_LINE = re.compile(
    r"^\s*(?://+|#+|/?\*+|--|;+)?\s*(?:@author\b|author\s*:|written by\b|created by\b|copyright\b).*$",
    re.IGNORECASE | re.MULTILINE)


def tier_for(lang_a: str, lang_b: str) -> str:
    if lang_a == lang_b:
        return "same_language"
    return TIER_TABLE.get(frozenset((lang_a, lang_b)), "cross_mixed")


def strip_author_identifiers(text: str, author: str | None = None) -> str:
    """Drop author/copyright comment lines and mask the author id itself."""
    text = _AUTHOR_LINE.sub("", text)
    if author and len(author) >= 3:
        text = re.sub(re.escape(author), "anon", text, flags=re.IGNORECASE)
    return text


# -- dataset ------------------------------------------------------------------------

@dataclass(frozen=True)
class DatasetFile:
    author: str
    language: str
    path: str


class Dataset:
    """Index of ``<root>/<author>/<language>/<file>``."""

    def __init__(self, root):
        self.root = Path(root)
        if not self.root.is_dir():
            raise DatasetError(f"dataset root {self.root} is not a directory")
        self.files: dict[str, dict[str, list[DatasetFile]]] = {}
        for author_dir in sorted(p for p in self.root.iterdir() if p.is_dir()):
            by_lang = {}
            for lang_dir in sorted(p for p in author_dir.iterdir() if p.is_dir()):
                lang = Language.coerce(lang_dir.name).value
                if lang == "unknown" and lang_dir.name.lower() != "unknown":
                    raise DatasetError(f"{lang_dir}: unknown language directory {lang_dir.name!r}")
                files = [DatasetFile(author_dir.name, lang, str(f))
                         for f in sorted(lang_dir.rglob("*")) if f.is_file()]
                if files:
                    by_lang[lang] = files
            if by_lang:
                self.files[author_dir.name] = by_lang
        if len(self.files) < 2:
            raise DatasetError(f"dataset {self.root} needs at least 2 authors, found {len(self.files)}")

    @property
    def authors(self) -> list[str]:
        return sorted(self.files)

    def by_language(self, language: str) -> list[DatasetFile]:
        return [f for a in self.authors for f in self.files[a].get(language, [])]

    def languages(self) -> list[str]:
        return sorted({lang for langs in self.files.values() for lang in langs})


@dataclass(frozen=True)
class PairSpec:
    sample_a: str
    sample_b: str
    label: bool
    tier: str
    language_a: str
    language_b: str
    author_a: str = ""
    author_b: str = ""

    def __post_init__(self):
        if self.tier not in TIERS:
            raise ContractError(f"unknown tier {self.tier!r}")

    def load(self) -> CodePair:
        samples = []
        for path, lang, author in ((self.sample_a, self.language_a, self.author_a),
                                   (self.sample_b, self.language_b, self.author_b)):
            raw = CodeSample.from_path(path, language=lang)
            samples.append(CodeSample(strip_author_identifiers(raw.text, author), raw.language, raw.origin))
        return CodePair(*samples)

    def to_dict(self) -> dict:
        return asdict(self)


def _spec(fa: DatasetFile, fb: DatasetFile, tier: str | None = None) -> PairSpec:
    return PairSpec(fa.path, fb.path, fa.author == fb.author, tier or tier_for(fa.language, fb.language),
                    fa.language, fb.language, fa.author, fb.author)


def _balanced(same: list, diff: list, n: int, rng: random.Random, what: str) -> list:
    n_same, n_diff = (n + 1) // 2, n // 2
    if n_same > len(same) or n_diff > len(diff):
        maximum = min(2 * len(same), 2 * len(diff) + 1)
        raise DatasetError(f"cannot draw {n} balanced {what} pairs: {len(same)} same-author and "
                           f"{len(diff)} different-author candidates allow at most n={maximum}")
    chosen = rng.sample(same, n_same) + rng.sample(diff, n_diff)
    rng.shuffle(chosen)
    return chosen


def sample_pairs(dataset_root, n: int, seed: int, language: str | None = None) -> list[PairSpec]:
    """Balanced same-language pairs; deterministic for a fixed (root, n, seed)."""
    if n < 0:
        raise ContractError("n must be non-negative")
    data = dataset_root if isinstance(dataset_root, Dataset) else Dataset(dataset_root)
    if n == 0:
        return []
    langs = [Language.coerce(language).value] if language else data.languages()
    same, diff = [], []
    for lang in langs:
        files = data.by_language(lang)
        for fa, fb in itertools.combinations(files, 2):
            (same if fa.author == fb.author else diff).append((fa, fb))
    rng = random.Random(seed)
    return [_spec(fa, fb) for fa, fb in _balanced(same, diff, n, rng, "same-language")]


def _cross_candidates(data: Dataset, lang_a: str, lang_b: str) -> tuple[list, list]:
    same, diff = [], []
    for a in data.authors:
        for fa in data.files[a].get(lang_a, []):
            for b in data.authors:
                for fb in data.files[b].get(lang_b, []):
                    (same if a == b else diff).append((fa, fb))
    return same, diff


def build_cross_language_pairs(dataset_root, lang_a: str, lang_b: str | None, n: int, seed: int,
                               languages=MIXED_LANGUAGES) -> list[PairSpec]:
    """Pairs with one sample per language. ``lang_a="mixed"`` draws language pairs uniformly."""
    data = dataset_root if isinstance(dataset_root, Dataset) else Dataset(dataset_root)
    if n < 0:
        raise ContractError("n must be non-negative")
    rng = random.Random(seed)
    if lang_a != "mixed":
        la, lb = Language.coerce(lang_a).value, Language.coerce(lang_b).value
        if la == lb:
            raise ContractError("cross-language pairs need two different languages")
        same, diff = _cross_candidates(data, la, lb)
        if n and not same:
            counts = {a: sorted(data.files[a]) for a in data.authors}
            raise DatasetError(f"no author has samples in both {la} and {lb}; languages per author: {counts}")
        if n == 0:
            return []
        return [_spec(fa, fb) for fa, fb in _balanced(same, diff, n, rng, f"{la}/{lb}")]

    langs = sorted({Language.coerce(x).value for x in languages})
    combos = list(itertools.combinations(langs, 2))
    pools = {c: _cross_candidates(data, *c) for c in combos}
    available = {True: sum(len(pools[c][0]) for c in combos), False: sum(len(pools[c][1]) for c in combos)}
    if n and available[True] == 0:
        raise DatasetError(f"no author has samples in two of {langs}")
    labels = [True] * ((n + 1) // 2) + [False] * (n // 2)
    used = set()
    out = []
    for label in labels:
        open_combos = [c for c in combos if any(p not in used for p in pools[c][0 if label else 1])]
        if not open_combos:
            maximum = min(2 * available[True], 2 * available[False] + 1)
            raise DatasetError(f"cannot draw {n} balanced mixed pairs; at most n={maximum}")
        combo = rng.choice(open_combos)
        choice = rng.choice([p for p in pools[combo][0 if label else 1] if p not in used])
        used.add(choice)
        out.append(_spec(*choice, tier="cross_mixed"))
    rng.shuffle(out)
    return out


# -- metrics --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ContractError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def f1(self) -> float:
        if self.tp == 0:
            return 0.0
        return 2 * self.tp / (2 * self.tp + self.fp + self.fn)

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PairRecord:
    index: int
    sample_a: str
    sample_b: str
    label: bool
    tier: str
    prediction: bool
    verdict: str
    score: float
    confidence: float
    uncertainty_flag: bool
    consensus: bool | None
    llm_calls: int
    trace_path: str | None = None


@dataclass
class EvalResult:
    matrix: ConfusionMatrix
    f1: float
    ec_rate: float | None = None
    records: list = field(default_factory=list)
    mode: str = "full"

    def summary(self) -> dict:
        out = {"mode": self.mode, "f1": self.f1, "matrix": self.matrix.to_dict(), "pairs": self.matrix.total}
        if self.ec_rate is not None:
            out["ec_rate"] = self.ec_rate
        return out


def compute_metrics(predictions, labels) -> EvalResult:
    predictions, labels = list(predictions), list(labels)
    if len(predictions) != len(labels):
        raise ContractError(f"{len(predictions)} predictions for {len(labels)} labels")
    counts = {"tp": 0, "fp": 0, "tn": 0, "fn": 0}
    for p, y in zip(predictions, labels):
        p, y = bool(p), bool(y)
        counts[("t" if p == y else "f") + ("p" if p else "n")] += 1
    matrix = ConfusionMatrix(**counts)
    return EvalResult(matrix, matrix.f1)


def _tendency(item) -> str:
    if isinstance(item, ExpertReport):
        return item.tendency
    if isinstance(item, Mapping):
        return item["tendency"]
    return str(item)


def expert_consensus(reports) -> bool:
    """True iff all four dimension tendencies are identical."""
    if isinstance(reports, Mapping):
        missing = [d for d in DIMENSIONS if d not in reports]
        if missing:
            raise ContractError(f"no report for {', '.join(missing)}")
        values = [_tendency(reports[d]) for d in DIMENSIONS]
    else:
        values = [_tendency(r) for r in reports]
        if len(values) != len(DIMENSIONS):
            raise ContractError(f"expected {len(DIMENSIONS)} reports, got {len(values)}")
    return len(set(values)) == 1


def consensus_rate(cases) -> float:
    flags = [expert_consensus(c) for c in cases]
    return sum(flags) / len(flags) if flags else 0.0


def format_ec(same_rate: float | None, cross_rate: float | None) -> str:
    """Same / cross consensus rates in percent, e.g. ``66.66 / 24.00``."""
    def pct(x):
        return "N/A" if x is None else f"{100 * x:.2f}"
    return f"{pct(same_rate)} / {pct(cross_rate)}"


# -- running --------------------------------------------------------------------------

BackendSource = Backend | Callable[[int, PairSpec], Backend]


def _backend_for(source, index: int, spec: PairSpec) -> Backend:
    if isinstance(source, Backend):
        return source
    return source(index, spec)


def evaluate_pairs(pairs, backend: BackendSource, config: EngineConfig | None = None, *, mode: str = "full",
                   trace_dir=None, workers: int = 1, clock_factory=None) -> EvalResult:
    """Run every pair through the engine; ``backend`` may be one backend or a per-pair factory."""
    if mode not in MODES:
        raise ContractError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
    pairs = list(pairs)
    config = config or EngineConfig()
    if trace_dir is not None:
        Path(trace_dir).mkdir(parents=True, exist_ok=True)

    def one(index: int):
        spec = pairs[index]
        clock = clock_factory() if clock_factory else None
        result = verify_pair(spec.load(), _backend_for(backend, index, spec), config, mode=mode, clock=clock)
        d = result.decision
        trace_path = None
        if trace_dir is not None:
            trace_path = str(Path(trace_dir) / f"pair_{index:04d}.jsonl")
            result.trace.save(trace_path)
        consensus = None if mode == "no_expansion" else expert_consensus(result.state.latest_reports)
        return PairRecord(index, spec.sample_a, spec.sample_b, spec.label, spec.tier,
                          binary_label(d.verdict, d.aggregate_score), d.verdict, d.aggregate_score, d.confidence,
                          d.verdict == "uncertain", consensus, result.llm_calls, trace_path)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, range(len(pairs))))
    else:
        records = [one(i) for i in range(len(pairs))]
    result = compute_metrics([r.prediction for r in records], [r.label for r in records])
    result.records = records
    result.mode = mode
    if mode != "no_expansion" and records:
        result.ec_rate = sum(r.consensus for r in records) / len(records)
    return result


def run_ablation(mode: str, pairs, backend: BackendSource, config: EngineConfig | None = None, **kwargs) -> EvalResult:
    return evaluate_pairs(pairs, backend, config, mode=mode, **kwargs)


def config_digest(config: EngineConfig) -> str:
    body = json.dumps(config.to_dict(), sort_keys=True)
    return hashlib.sha256(body.encode("utf-8")).hexdigest()[:16]


def write_results(result: EvalResult, path, *, seed=None, config: EngineConfig | None = None) -> None:
    """One JSON line per pair, then a summary line."""
    summary = result.summary()
    summary["seed"] = seed
    summary["config_digest"] = config_digest(config or EngineConfig())
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in result.records:
            fh.write(json.dumps({"pair": asdict(record)}, sort_keys=True) + "\n")
        fh.write(json.dumps({"summary": summary}, sort_keys=True) + "\n")
