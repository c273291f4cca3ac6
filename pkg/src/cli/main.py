"""Command-line front end: simulate, sweep, presets and schema subcommands.

Exit codes: 0 success, 2 bad flags or an invalid config/model document,
3 a workload that cannot run on the config (no feasible mapping, KV cache over HBM).
"""
import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd
from loguru import logger

from src.config import get_settings
from src.dse import (
    STAGES,
    SweepError,
    WorkloadSpec,
    compare_to_baseline,
    default_grid,
    pareto_front,
    sweep,
    table_document,
    table_v_grid,
)
from src.hardware import (
    BASELINE_NAME,
    PRESETS,
    ConfigError,
    TpuConfig,
    UnknownPresetError,
    load_config,
    parse_config,
    preset_names,
)
from src.mapping import MappingError, evaluate_graph, write_mapping_trace
from src.parallel import (
    CapacityError,
    ParallelismError,
    ParallelismPlan,
    dit_end_to_end,
    llm_end_to_end,
    plan_by_name,
    shard_graph,
)
from src.workload import (
    GraphError,
    InferenceParams,
    ModelFamily,
    Precision,
    WorkloadError,
    build_layer,
    load_builtin_models,
    load_model,
)

from .reports import (
    REPORT_FORMATS,
    EndToEndReportDoc,
    LayerReportDoc,
    WorkloadEcho,
    end_to_end_document,
    layer_document,
    render,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3

USAGE_ERRORS = (ConfigError, UnknownPresetError, WorkloadError, GraphError, ParallelismError, SweepError)
INFEASIBLE_ERRORS = (MappingError, CapacityError)


def configure_logging(level: Optional[str] = None):
    """Single stderr sink; reports on stdout stay clean."""
    logger.enable("src")
    logger.remove()
    logger.add(sys.stderr, level=(level or get_settings().log_level).upper())


def _add_workload_flags(parser: argparse.ArgumentParser, out_len: int = 0):
    parser.add_argument("--batch", type=int, default=8, help="Batch size (default 8)")
    parser.add_argument("--seq-in", type=int, default=1024, help="Prompt length (default 1024)")
    parser.add_argument(
        "--out-len", type=int, default=out_len, help=f"Generated tokens for end2end (default {out_len})"
    )
    parser.add_argument("--decode-pos", type=int, default=1, help="Decode position for --stage decode")
    parser.add_argument("--resolution", type=int, default=512, help="DiT image resolution (default 512)")
    parser.add_argument("--precision", choices=[p.value for p in Precision], default="int8")
    parser.add_argument("--tp", type=int, default=1, help="Tensor-parallel degree")
    parser.add_argument("--pp", type=int, default=1, help="Pipeline stages")
    parser.add_argument("--microbatches", type=int, help="Pipeline microbatches (default: --pp)")
    parser.add_argument("--plan", help="Named plan (single, tp2, pp2, tp4, pp4); overrides --tp/--pp")
    parser.add_argument("--decode-stride", type=int, default=1, help="Evaluate every n-th decode step")
    parser.add_argument("--steps", type=int, help="Diffusion steps for DiT end2end")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cimtpu",
        description="Analytical latency/energy simulator for TPUs with digital or CIM matrix units",
    )
    parser.add_argument("--log-level", help="Override CIMTPU_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="Evaluate one workload on one config")
    simulate.add_argument("--config", default=BASELINE_NAME, help="Preset name or config JSON file")
    simulate.add_argument("--model", required=True, help="Built-in model name or model JSON file")
    simulate.add_argument("--stage", choices=STAGES, default="prefill")
    _add_workload_flags(simulate)
    simulate.add_argument("--format", choices=REPORT_FORMATS, default="json")
    simulate.add_argument("--output", "-o", help="Write the report here instead of stdout")
    simulate.add_argument("--trace-mappings", help="Dump every candidate mapping to this JSON file")
    simulate.add_argument("--stamp", action="store_true", help="Add a generation timestamp")

    sweep_parser = sub.add_parser("sweep", help="Evaluate a workload over a grid of configs")
    grid = sweep_parser.add_mutually_exclusive_group()
    grid.add_argument("--grid", help="Grid JSON file: {\"configs\": [preset name, file or config document, ...]}")
    grid.add_argument("--table-v", action="store_true", help="The nine CIM design points")
    grid.add_argument("--configs", nargs="+", help="Preset names or config files")
    sweep_parser.add_argument("--models", nargs="+", default=["gpt3-30b"], help="Workloads to sweep")
    sweep_parser.add_argument("--stage", choices=STAGES, default="end2end")
    _add_workload_flags(sweep_parser, out_len=512)
    sweep_parser.add_argument("--baseline", default=BASELINE_NAME, help="Normalization row")
    sweep_parser.add_argument("--pareto", action="store_true", help="Keep only the latency/MXU-energy front")
    sweep_parser.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep_parser.add_argument("--output", "-o", help="Write the table here instead of stdout")

    sub.add_parser("presets", help="List built-in configs and models")

    schema = sub.add_parser("schema", help="Print a JSON schema")
    schema.add_argument("document", choices=("config", "layer", "end2end"))
    return parser


# --- Argument resolution ---


def _check_args(parser: argparse.ArgumentParser, args):
    if args.command == "simulate" and args.trace_mappings and args.stage == "end2end":
        parser.error("--trace-mappings needs a single-layer --stage (prefill, decode or block)")


def _warn_prefill_only(model, args):
    if args.stage == "end2end" and model.family is ModelFamily.LLM and args.out_len == 0:
        logger.warning("end2end with --out-len 0 covers only the prefill of {}", model.name)


def _params(args) -> InferenceParams:
    return InferenceParams(
        batch=args.batch,
        seq_in=args.seq_in,
        decode_pos=args.decode_pos,
        out_len=args.out_len,
        image_resolution=args.resolution,
        precision=Precision(args.precision),
    )


def _plan(args) -> ParallelismPlan:
    if args.plan:
        return plan_by_name(args.plan)
    return ParallelismPlan(tp_degree=args.tp, pp_stages=args.pp, microbatches=args.microbatches)


def _grid(args) -> list[TpuConfig]:
    if args.table_v:
        return table_v_grid()
    if args.configs:
        return [load_config(name) for name in args.configs]
    if args.grid:
        path = Path(args.grid)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Failed to read grid file {path}: {e}") from e
        entries = doc.get("configs") if isinstance(doc, dict) else None
        if not entries:
            raise ConfigError(f"Grid file {path} needs a non-empty 'configs' list")
        return [
            parse_config(json.dumps(entry)) if isinstance(entry, dict) else load_config(entry)
            for entry in entries
        ]
    return default_grid()


def _emit(text: str, output: Optional[str]):
    if output:
        Path(output).write_text(text, encoding="utf-8")
        logger.info("wrote {}", output)
    else:
        sys.stdout.write(text)


# --- Commands ---


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    model = load_model(args.model)
    _warn_prefill_only(model, args)
    params = _params(args)
    plan = _plan(args)
    echo = WorkloadEcho.of(model.name, args.stage, params, plan.name)

    if args.stage == "end2end":
        if model.family is ModelFamily.LLM:
            report = llm_end_to_end(model, params, plan, cfg, decode_stride=args.decode_stride)
        else:
            report = dit_end_to_end(model, params, plan, cfg, n_steps=args.steps)
        doc = end_to_end_document(report, cfg, echo, stamp=args.stamp)
    else:
        graph = shard_graph(build_layer(model, params, args.stage), plan.tp_degree)
        doc = layer_document(evaluate_graph(graph, cfg), cfg, echo, stamp=args.stamp)
        if args.trace_mappings:
            write_mapping_trace(list(graph.topological_order()), cfg, args.trace_mappings)

    _emit(render(doc, args.format), args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid = _grid(args)
    baseline = PRESETS[BASELINE_NAME] if args.baseline == BASELINE_NAME else load_config(args.baseline)
    if all(cfg.name != baseline.name for cfg in grid):
        grid = [baseline, *grid]
    params = _params(args)
    plan = _plan(args)

    tables = []
    for name in args.models:
        model = load_model(name)
        _warn_prefill_only(model, args)
        spec = WorkloadSpec(
            model=model,
            params=params,
            stage=args.stage,
            decode_stride=args.decode_stride,
            n_steps=args.steps,
        )
        table = compare_to_baseline(sweep(grid, spec, plan), baseline.name)
        tables.append(pareto_front(table) if args.pareto else table)

    combined = pd.concat(tables, ignore_index=True)
    if args.format == "json":
        text = table_document(combined) + "\n"
    else:
        text = combined.to_csv(index=False, lineterminator="\n")
    _emit(text, args.output)
    return EXIT_OK


def cmd_presets(args) -> int:
    lines = ["configs:"]
    for name in preset_names():
        cfg = PRESETS[name]
        lines.append(f"  {name:<18} {cfg.mxu_count} x {cfg.mxu.label:<16} {cfg.peak_macs_per_cycle:>8.0f} MACs/cycle")
    lines.append("models:")
    for name, model in load_builtin_models().items():
        lines.append(
            f"  {name:<18} {model.family.value:<4} layers={model.n_layers} heads={model.n_heads} d_model={model.d_model}"
        )
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_schema(args) -> int:
    documents = {"config": TpuConfig, "layer": LayerReportDoc, "end2end": EndToEndReportDoc}
    sys.stdout.write(json.dumps(documents[args.document].model_json_schema(), indent=2) + "\n")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "presets": cmd_presets,
    "schema": cmd_schema,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_args(parser, args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    configure_logging(args.log_level)

    try:
        return COMMANDS[args.command](args)
    except INFEASIBLE_ERRORS as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except USAGE_ERRORS as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        # pydantic ValidationError (bad flag values) is a ValueError
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
