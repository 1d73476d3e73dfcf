"""Command line frontend: detect, serve, eval, replay, calibrate.

Prediction JSON printed by ``detect`` is byte-identical to the
``prediction`` document the service returns for the same state and input.
Diagnostics go to stderr; exit code 2 means bad input, 3 means bad state.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ParseError, SemtypeError, StateError, ValidationError
from .evaluation import evaluate, load_labeled_corpus, sweep_tau
from .pipeline import PipelineConfig, calibrate_tau, run_pipeline
from .state import TenantState, canonical_json
from .store import GLOBAL_DIR, Store, load_global_dir, parse_config_text
from .tables import parse_table

EXIT_INPUT_ERROR = 2
EXIT_STATE_ERROR = 3


def _load_config(args, base: PipelineConfig) -> PipelineConfig:
    config = base
    if getattr(args, "config", None):
        config = parse_config_text(Path(args.config).read_text(), base=config)
    overrides = {}
    if getattr(args, "top_k", None) is not None:
        overrides["top_k"] = args.top_k
    if getattr(args, "tau", None) is not None:
        overrides["abstain_threshold"] = args.tau
    if getattr(args, "gate", None) is not None:
        overrides["stage_gate"] = args.gate
    if getattr(args, "sample_cap", None) is not None:
        overrides["sample_cap"] = args.sample_cap
    return replace(config, **overrides) if overrides else config


def _model_state(args):
    data_dir = Path(args.state_dir)
    global_dir = data_dir / GLOBAL_DIR
    if not global_dir.is_dir():
        # allow pointing straight at a global directory
        global_dir = data_dir
    global_state = load_global_dir(global_dir)
    tenant = TenantState(getattr(args, "tenant", None) or "cli")
    if getattr(args, "tenant", None) and (data_dir / "tenants").is_dir():
        store = Store(data_dir)
        tenant = store.tenant(args.tenant)
    return global_state, tenant


def cmd_detect(args) -> int:
    global_state, tenant = _model_state(args)
    config = _load_config(args, global_state.config)
    data = Path(args.csv).read_bytes()
    table = parse_table(
        data,
        delimiter=args.delimiter,
        has_header=not args.no_header,
        max_rows=args.max_rows,
        table_id=Path(args.csv).stem,
        name=Path(args.csv).stem,
    )
    predictions = run_pipeline(table, tenant.model_state(global_state), config)
    doc = {
        "columns": [p.to_json_dict() for p in predictions],
        "ontology_version": global_state.ontology.version + len(tenant.user_type_names),
        "model_revision": f"g{global_state.revision}.e{tenant.n_events()}",
    }
    sys.stdout.write(canonical_json(doc).decode("utf-8") + "\n")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    store = Store(Path(args.state_dir))
    app = create_app(store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_eval(args) -> int:
    global_state, tenant = _model_state(args)
    config = _load_config(args, global_state.config)
    corpus = load_labeled_corpus(args.corpus)
    if not any(labels for _, labels in corpus):
        raise ValidationError("corpus is empty or has no labels")
    state = tenant.model_state(global_state)
    out: dict = {}
    if args.target_precision is not None:
        result = calibrate_tau(corpus, state, config, args.target_precision)
        config = replace(config, abstain_threshold=result.tau)
        out["calibration"] = {
            "tau": result.tau,
            "warning": result.warning,
            "target_precision": args.target_precision,
        }
    report = evaluate(corpus, state, config)
    out["report"] = report.to_json_dict()
    if args.sweep_tau:
        out["curve"] = sweep_tau(corpus, state, config)
    sys.stdout.write(canonical_json(out).decode("utf-8") + "\n")
    return 0


def cmd_replay(args) -> int:
    store = Store(Path(args.state_dir))
    log_path = Path(args.log) if args.log else None
    tenant = store.replay_tenant(args.tenant, log_path)
    summary = {
        "tenant_id": tenant.tenant_id,
        "n_events": tenant.n_events(),
        "n_labeling_functions": len(tenant.lf_registry),
        "n_examples": len(tenant.accumulated_examples()),
        "n_weak_examples": len(tenant.weak_examples),
        "user_types": list(tenant.user_type_names),
        "weights": {
            t: tenant.weights.w_local(t)
            for t in sorted(tenant.weights.feedback_counts)
        },
        "retrained": tenant.classifier_params is not None,
        "snapshot_sha256": hashlib.sha256(tenant.to_snapshot()).hexdigest(),
    }
    sys.stdout.write(canonical_json(summary).decode("utf-8") + "\n")
    return 0


def cmd_calibrate(args) -> int:
    global_state, tenant = _model_state(args)
    config = _load_config(args, global_state.config)
    corpus = load_labeled_corpus(args.corpus)
    if not any(labels for _, labels in corpus):
        raise ValidationError("corpus is empty or has no labels")
    result = calibrate_tau(
        corpus, tenant.model_state(global_state), config, args.target_precision
    )
    out = {
        "tau": result.tau,
        "warning": result.warning,
        "target_precision": args.target_precision,
        "curve": result.curve,
    }
    sys.stdout.write(canonical_json(out).decode("utf-8") + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semtype", description="semantic column type detection"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="predict types for one CSV")
    detect.add_argument("csv")
    detect.add_argument("--state-dir", required=True)
    detect.add_argument("--tenant", default=None)
    detect.add_argument("--delimiter", default=",")
    detect.add_argument("--no-header", action="store_true")
    detect.add_argument("--max-rows", type=int, default=10_000)
    detect.add_argument("--config", default=None)
    detect.add_argument("--top-k", type=int, default=None)
    detect.add_argument("--tau", type=float, default=None)
    detect.add_argument("--gate", type=float, default=None)
    detect.add_argument("--sample-cap", type=int, default=None)
    detect.set_defaults(func=cmd_detect)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--state-dir", required=True)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8787)
    serve.set_defaults(func=cmd_serve)

    ev = sub.add_parser("eval", help="precision/coverage on a labeled corpus")
    ev.add_argument("corpus")
    ev.add_argument("--state-dir", required=True)
    ev.add_argument("--tenant", default=None)
    ev.add_argument("--config", default=None)
    ev.add_argument("--top-k", type=int, default=None)
    ev.add_argument("--tau", type=float, default=None)
    ev.add_argument("--gate", type=float, default=None)
    ev.add_argument("--sample-cap", type=int, default=None)
    ev.add_argument("--sweep-tau", action="store_true")
    ev.add_argument("--target-precision", type=float, default=None)
    ev.set_defaults(func=cmd_eval)

    replay = sub.add_parser("replay", help="rebuild tenant state from a feedback log")
    replay.add_argument("log", nargs="?", default=None)
    replay.add_argument("--state-dir", required=True)
    replay.add_argument("--tenant", required=True)
    replay.set_defaults(func=cmd_replay)

    cal = sub.add_parser("calibrate", help="pick the abstention threshold")
    cal.add_argument("corpus")
    cal.add_argument("--state-dir", required=True)
    cal.add_argument("--tenant", default=None)
    cal.add_argument("--config", default=None)
    cal.add_argument("--target-precision", type=float, required=True)
    cal.set_defaults(func=cmd_calibrate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc.message} {exc.detail or ''}".rstrip(), file=sys.stderr)
        return EXIT_INPUT_ERROR
    except StateError as exc:
        print(f"state error: {exc.message}", file=sys.stderr)
        return EXIT_STATE_ERROR
    except SemtypeError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
