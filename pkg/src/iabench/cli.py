"""Command-line front end: generate, resume, evaluate, compare, inspect.

Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from iabench.core.manifest import load_manifest
from iabench.core.storage import sample_records
from iabench.errors import IABenchError, PipelineError, UsageError
from iabench.evalpipe.report import EvaluationReport, compare, render_report
from iabench.evalpipe.runner import load_dataset, run_model_under_test, score_report
from iabench.genpipe.config import PipelineConfig
from iabench.genpipe.run import resume_run, run_pipeline
from iabench.provider.base import Provider, ProviderConfig
from iabench.provider.http import HttpProvider
from iabench.provider.mock import MockProvider

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _add_provider_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--provider", choices=("mock", "http"), default="mock",
                        help="backend: deterministic offline mock (default) or http")
    parser.add_argument("--endpoint", default="",
                        help="base URL for the http provider")
    parser.add_argument("--api-key-env", default="IABENCH_API_KEY",
                        help="environment variable holding the API key")
    parser.add_argument("--rpm", type=int, default=60,
                        help="requests-per-minute limit for the http provider")
    parser.add_argument("--max-retries", type=int, default=3,
                        help="retry budget for transient http failures")


def _make_provider(args: argparse.Namespace, seed: int) -> Provider:
    if args.provider == "mock":
        return MockProvider(seed=seed, log_requests=False)
    if not args.endpoint:
        raise UsageError("--endpoint is required with --provider http")
    config = ProviderConfig(endpoint_url=args.endpoint, api_key_env_var=args.api_key_env,
                            requests_per_minute=args.rpm, max_retries=args.max_retries)
    return HttpProvider(config)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iabench",
                                     description="Synthetic instruction-answer benchmark "
                                                 "generation and LLM evaluation")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    generate = sub.add_parser("generate", help="run the generation pipeline")
    generate.add_argument("--config", required=True, help="pipeline config JSON file")
    generate.add_argument("--out", required=True, help="run directory")
    generate.add_argument("--seed", type=int, default=0, help="64-bit run seed")
    _add_provider_flags(generate)

    resume = sub.add_parser("resume", help="continue an interrupted run")
    resume.add_argument("--run", required=True, help="existing run directory")
    _add_provider_flags(resume)

    evaluate = sub.add_parser("evaluate", help="evaluate a model on a dataset")
    evaluate.add_argument("--dataset", required=True, help="dataset JSONL file")
    evaluate.add_argument("--model", required=True, help="model-under-test id")
    evaluate.add_argument("--judge", default="gemini-2.5-pro", help="judge model id")
    evaluate.add_argument("--embed-model", default="bge-m3", help="embedding model id")
    evaluate.add_argument("--out", required=True, help="output directory for reports")
    evaluate.add_argument("--sample", type=int, default=None,
                          help="evaluate a random sample of this size")
    evaluate.add_argument("--seed", type=int, default=0,
                          help="seed for sampling and the mock provider")
    _add_provider_flags(evaluate)

    compare_cmd = sub.add_parser("compare", help="compute deltas between two reports")
    compare_cmd.add_argument("--ref", required=True, help="reference report.json")
    compare_cmd.add_argument("--cmp", required=True, help="comparison report.json")
    compare_cmd.add_argument("--out", required=True,
                             help="deltas.csv path (a .md sibling is written too) "
                                  "or an output directory")

    inspect = sub.add_parser("inspect", help="show a run's manifest state")
    inspect.add_argument("--run", required=True, help="run directory")

    return parser


def _cmd_generate(args: argparse.Namespace) -> int:
    config_path = Path(args.config)
    if not config_path.exists():
        raise UsageError(f"config file not found: {config_path}")
    try:
        config = PipelineConfig.from_dict(json.loads(config_path.read_text(encoding="utf-8")))
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}") from exc
    provider = _make_provider(args, args.seed)
    dataset_path = run_pipeline(config, args.seed, Path(args.out), provider)
    print(f"dataset written to {dataset_path}")
    return EXIT_OK


def _cmd_resume(args: argparse.Namespace) -> int:
    run_dir = Path(args.run)
    manifest = load_manifest(run_dir)
    provider = _make_provider(args, manifest.random_seed)
    dataset_path = resume_run(run_dir, provider)
    print(f"dataset written to {dataset_path}")
    return EXIT_OK


def _cmd_evaluate(args: argparse.Namespace) -> int:
    dataset = load_dataset(Path(args.dataset))
    if args.sample is not None:
        dataset = sample_records(dataset, args.sample, args.seed)
    provider = _make_provider(args, args.seed)
    answered = run_model_under_test(dataset, provider, args.model)
    report = score_report(answered, provider, args.judge, args.embed_model,
                          dataset_id=Path(args.dataset).stem, model_id=args.model)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    (out_dir / "report.md").write_text(render_report(report, "markdown"), encoding="utf-8")
    print(f"report written to {out_dir / 'report.json'}")
    return EXIT_OK


def _cmd_compare(args: argparse.Namespace) -> int:
    for path in (args.ref, args.cmp):
        if not Path(path).exists():
            raise UsageError(f"report not found: {path}")
    delta = compare(EvaluationReport.load(args.ref), EvaluationReport.load(args.cmp))
    out = Path(args.out)
    if out.suffix == ".csv":
        csv_path, md_path = out, out.with_suffix(".md")
        out.parent.mkdir(parents=True, exist_ok=True)
    else:
        out.mkdir(parents=True, exist_ok=True)
        csv_path, md_path = out / "deltas.csv", out / "deltas.md"
    csv_path.write_text(render_report(delta, "csv"), encoding="utf-8")
    md_path.write_text(render_report(delta, "markdown"), encoding="utf-8")
    print(f"deltas written to {csv_path}")
    return EXIT_OK


def _cmd_inspect(args: argparse.Namespace) -> int:
    manifest = load_manifest(Path(args.run))
    print(f"run_id: {manifest.run_id}")
    print(f"config_hash: {manifest.config_hash}")
    print(f"random_seed: {manifest.random_seed}")
    for state in manifest.stage_states:
        count = "-" if state.record_count is None else str(state.record_count)
        print(f"  {state.stage_name:<14} {state.status:<9} records={count}")
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "resume": _cmd_resume,
    "evaluate": _cmd_evaluate,
    "compare": _cmd_compare,
    "inspect": _cmd_inspect,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except IABenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
