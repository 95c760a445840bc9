"""Command-line interface: verify, extract, eval, replay.

Exit codes
    0   same_author (verify) or success
    1   different_author
    2   uncertain
    64  usage error, unreadable input file, unknown tool
    65  corrupt trace or transcript (reports the offending event index)
    66  dataset error (layout, deficits, n above the available maximum)
    69  completion service unavailable or replay fixture miss
    70  internal error
    78  invalid configuration
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .coordinator.config import EngineConfig
from .coordinator.engine import MODES, verify_pair
from .coordinator.narrative import render_narrative
from .coordinator.trace import parse_trace, wall_clock
from .errors import (
    AuthorVerifyError,
    BackendError,
    ConfigurationError,
    DatasetError,
    FormatError,
    InputError,
    RegistryError,
)
from .evaluation import (
    MIXED_LANGUAGES,
    build_cross_language_pairs,
    evaluate_pairs,
    format_ec,
    sample_pairs,
    write_results,
)
from .llm.backends import LiveBackend, LiveSettings, MeteredBackend, ReplayBackend
from .llm.heuristic import HeuristicBackend
from .llm.transcript import Transcript, load_transcript
from .stylometry.profiles import TOOL_NAMES, extract_tool_profile
from .stylometry.tokenizer import CodeSample

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_VERDICT = {"same_author": 0, "different_author": 1, "uncertain": 2}
EXIT_USAGE = 64
EXIT_DATAERR = 65
EXIT_NOINPUT = 66
EXIT_UNAVAILABLE = 69
EXIT_SOFTWARE = 70
EXIT_CONFIG = 78

DEFAULT_CONFIG = "authorverify.toml"
BACKENDS = ("heuristic", "live", "replay")

# env var -> (settings key, type)
ENV_KEYS = {
    "AUTHORVERIFY_BACKEND": ("backend", str),
    "AUTHORVERIFY_ENDPOINT": ("endpoint", str),
    "AUTHORVERIFY_MODEL": ("model", str),
    "AUTHORVERIFY_API_KEY_ENV": ("api_key_env", str),
    "AUTHORVERIFY_TIMEOUT": ("timeout", float),
    "AUTHORVERIFY_MAX_CONCURRENCY": ("max_concurrency", int),
    "AUTHORVERIFY_TRANSCRIPT": ("transcript", str),
    "AUTHORVERIFY_SEED": ("seed", int),
    "AUTHORVERIFY_CALLS": ("calls", int),
}
BACKEND_KEYS = ("backend", "endpoint", "model", "api_key_env", "timeout", "max_concurrency", "transcript")


@dataclass
class RunConfig:
    backend: str = "heuristic"
    endpoint: str = LiveSettings.endpoint
    model: str = LiveSettings.model
    api_key_env: str = LiveSettings.api_key_env
    timeout: float = LiveSettings.timeout
    max_concurrency: int = LiveSettings.max_concurrency
    transcript: str | None = None
    seed: int = 0
    engine: EngineConfig = field(default_factory=EngineConfig)

    def validate(self) -> "RunConfig":
        if self.backend not in BACKENDS:
            raise ConfigurationError(f"backend must be one of {', '.join(BACKENDS)}, got {self.backend!r}")
        if self.backend == "replay" and not self.transcript:
            raise ConfigurationError("the replay backend needs a transcript path")
        self.engine.validate()
        return self


def _file_settings(data: dict) -> tuple[dict, dict]:
    """Split a parsed config file into flat run settings and engine settings."""
    data = dict(data)
    flat = {k: v for k, v in dict(data.pop("backend", {}) or {}).items()}
    if "kind" in flat:
        flat["backend"] = flat.pop("kind")
    for k in ("seed",):
        if k in data:
            flat[k] = data.pop(k)
    engine = {}
    for section in ("thresholds", "budgets"):
        if section in data:
            engine[section] = dict(data.pop(section))
    weights = data.pop("weights", {}) or {}
    if "same_language" in weights:
        engine["same_language_weights"] = dict(weights["same_language"])
    if "cross_language" in weights:
        engine["cross_language_weights"] = dict(weights["cross_language"])
    for k in ("cross_language_disabled", "prompt_pack", "expert_steps", "expert_workers"):
        if k in data:
            engine[k] = data.pop(k)
    if data:
        raise ConfigurationError(f"unknown config keys: {', '.join(sorted(data))}")
    unknown = set(flat) - set(BACKEND_KEYS) - {"seed"}
    if unknown:
        raise ConfigurationError(f"unknown [backend] keys: {', '.join(sorted(unknown))}")
    return flat, engine


def _env_settings(env) -> dict:
    out = {}
    for var, (key, kind) in ENV_KEYS.items():
        if env.get(var) not in (None, ""):
            try:
                out[key] = kind(env[var])
            except ValueError:
                raise ConfigurationError(f"{var}={env[var]!r} is not a valid {kind.__name__}") from None
    return out


def resolve_run_config(file_data: dict | None, env, flags: dict) -> RunConfig:
    """Merge settings with precedence flags > environment > file."""
    flat, engine = _file_settings(file_data or {})
    layered = {**flat, **_env_settings(env), **{k: v for k, v in flags.items() if v is not None}}
    calls = layered.pop("calls", None)
    cfg = EngineConfig.from_mapping(engine) if engine else EngineConfig()
    if calls is not None:
        cfg.budgets.calls = int(calls)
    run = RunConfig(engine=cfg, **{k: v for k, v in layered.items() if k in RunConfig.__dataclass_fields__})
    return run.validate()


def load_config_file(path: str | None) -> dict:
    if path is None:
        if not Path(DEFAULT_CONFIG).is_file():
            return {}
        path = DEFAULT_CONFIG
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid TOML: {exc}") from None


def make_backend(run: RunConfig, record: str | None = None):
    """The configured backend, plus an empty transcript when recording is requested."""
    transcript = Transcript() if record else None
    if run.backend == "heuristic":
        return HeuristicBackend(), transcript
    if run.backend == "replay":
        return ReplayBackend(load_transcript(run.transcript)), transcript
    settings = LiveSettings(endpoint=run.endpoint, model=run.model, api_key_env=run.api_key_env,
                            timeout=run.timeout, max_concurrency=run.max_concurrency)
    return LiveBackend(settings), transcript


# -- commands -------------------------------------------------------------------------

def _read_sample(path: str, lang: str | None) -> CodeSample:
    try:
        return CodeSample.from_path(path, language=lang)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def cmd_verify(args, run: RunConfig) -> int:
    a = _read_sample(args.file_a, args.lang_a)
    b = _read_sample(args.file_b, args.lang_b)
    backend, transcript = make_backend(run, args.record)
    meter = MeteredBackend(backend, run.engine.budgets.calls, transcript)
    clock = wall_clock if args.wall_clock else None
    result = verify_pair((a, b), meter, run.engine, mode=args.mode, clock=clock)
    if args.trace_out:
        result.trace.save(args.trace_out)
    if transcript is not None:
        transcript.save(args.record)
    print(json.dumps(result.decision.to_dict(), indent=2, sort_keys=True))
    return EXIT_VERDICT[result.decision.verdict]


def cmd_extract(args, run: RunConfig) -> int:
    sample = _read_sample(args.file, args.lang)
    profile = extract_tool_profile(args.tool, sample)
    print(profile.to_json())
    return 0


def cmd_eval(args, run: RunConfig) -> int:
    seed = args.seed if args.seed is not None else run.seed
    if args.cross:
        pairs = build_cross_language_pairs(args.dataset_root, args.cross[0], args.cross[1], args.n, seed)
    elif args.mixed:
        langs = args.mixed_languages.split(",") if args.mixed_languages else MIXED_LANGUAGES
        pairs = build_cross_language_pairs(args.dataset_root, "mixed", None, args.n, seed, languages=langs)
    else:
        pairs = sample_pairs(args.dataset_root, args.n, seed, language=args.language)
    # a shared transcript is consumed in pair order, so replay and recording stay sequential
    if (run.backend == "replay" or args.record) and args.workers > 1:
        raise ConfigurationError("replay and --record need --workers 1")
    backend, transcript = make_backend(run, args.record)
    cap = run.engine.budgets.calls

    def per_pair(index, spec):
        return MeteredBackend(backend, cap, transcript)

    result = evaluate_pairs(pairs, per_pair, run.engine, mode=args.mode, trace_dir=args.trace_dir,
                            workers=args.workers)
    if transcript is not None:
        transcript.save(args.record)
    if args.out:
        write_results(result, args.out, seed=seed, config=run.engine)
    summary = result.summary()
    summary["seed"] = seed
    if args.mode != "no_expansion":
        summary["ec"] = format_ec(result.ec_rate, None) if not (args.cross or args.mixed) \
            else format_ec(None, result.ec_rate)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def cmd_replay(args, run: RunConfig) -> int:
    try:
        text = Path(args.trace).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {args.trace}: {exc.strerror or exc}") from None
    events = parse_trace(text, source=args.trace)
    print(render_narrative(events))
    print(json.dumps(events[-1]["parsed_payload"], indent=2, sort_keys=True))
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"TOML config file (default ./{DEFAULT_CONFIG} when present)")
    common.add_argument("--backend", choices=BACKENDS)
    common.add_argument("--endpoint")
    common.add_argument("--model")
    common.add_argument("--transcript", help="replay transcript (JSONL)")
    common.add_argument("--calls", type=int, help="per-case call cap")
    parser = _Parser(prog="authorverify", description="Code authorship verification.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="verify one pair", parents=[common])
    p.add_argument("--file-a", required=True)
    p.add_argument("--file-b", required=True)
    p.add_argument("--lang-a")
    p.add_argument("--lang-b")
    p.add_argument("--trace-out")
    p.add_argument("--record", help="write a replay transcript of the run")
    p.add_argument("--mode", choices=MODES, default="full")
    p.add_argument("--wall-clock", action="store_true", help="real timestamps instead of logical ticks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("extract", help="print one tool profile", parents=[common])
    p.add_argument("--tool", required=True, help="one of: " + ", ".join(TOOL_NAMES))
    p.add_argument("--file", required=True)
    p.add_argument("--lang")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("eval", help="evaluate sampled pairs from a dataset directory", parents=[common])
    p.add_argument("--dataset-root", required=True)
    p.add_argument("--mode", choices=MODES, default="full")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--trace-dir")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--record", help="write one transcript covering every pair, in order")
    p.add_argument("--language", help="restrict same-language pairs to one language")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--cross", nargs=2, metavar=("LANG_A", "LANG_B"))
    group.add_argument("--mixed", action="store_true")
    p.add_argument("--mixed-languages", help=f"comma list (default {','.join(MIXED_LANGUAGES)})")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("replay", help="render a recorded case trace", parents=[common])
    p.add_argument("--trace", required=True)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None, env=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    env = os.environ if env is None else env
    try:
        flags = {"backend": args.backend, "endpoint": args.endpoint, "model": args.model,
                 "transcript": args.transcript, "calls": args.calls}
        run = resolve_run_config(load_config_file(args.config), env, flags)
        return args.func(args, run)
    except RegistryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATAERR
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOINPUT
    except BackendError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNAVAILABLE
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AuthorVerifyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOFTWARE


if __name__ == "__main__":
    sys.exit(main())
