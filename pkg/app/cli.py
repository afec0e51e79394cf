"""Command-line entry point: ``python -m app <subcommand>``."""
import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from app.config.settings import get_settings
from app.errors import ConfigError, QFragError
from app.models.enums import BackendMode, ModelFamily
from app.parsing.qasm import load_qasm
from app.schemas.learn import GridSpec
from app.schemas.run import RunConfig
from app.schemas.simulation import NoiseModel, load_noise_model
from app.services.corpus import load_corpus, random_corpus
from app.services.dataset import DatasetService
from app.services.features import extract_features
from app.services.fragmentation import FragmentationService
from app.services.pipeline import PipelineService, write_atomic
from app.services.reconstruction import cut_study
from app.services.training import TrainingService

logger = logging.getLogger("app.cli")


# --- Shared helpers ---

def _noise(args) -> NoiseModel:
    noise = load_noise_model(args.noise) if args.noise else NoiseModel.default()
    return noise.with_seed(args.seed)


def _backend(args):
    mode = args.backend or get_settings().backend
    return PipelineService.make_backend(mode, args.shots, _noise(args))


def _corpus(args, cuttable: bool = False):
    if args.corpus:
        return load_corpus(args.corpus)
    if args.random:
        return random_corpus(
            args.random, args.min_qubits, args.max_qubits, args.gates, args.seed,
            cuttable=cuttable, max_cut=getattr(args, "max_cut", 2),
        )
    raise ConfigError("give a corpus directory (--corpus) or a random corpus size (--random)")


def _add_corpus_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", type=Path, help="Directory of .qasm files")
    parser.add_argument("--random", type=int, help="Generate this many random circuits instead")
    parser.add_argument("--min-qubits", type=int, default=3)
    parser.add_argument("--max-qubits", type=int, default=6)
    parser.add_argument("--gates", type=int, default=20, help="Gates per random circuit")


def _circuit_path(args) -> Path:
    path = getattr(args, "circuit_flag", None) or args.circuit
    if path is None:
        raise ConfigError(f"{args.command} needs a circuit file (positional or --circuit)")
    return path


def _add_circuit_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("circuit", nargs="?", type=Path, help="OpenQASM 2.0 file")
    parser.add_argument("--circuit", dest="circuit_flag", type=Path, help="Same as the positional")


def _emit(args, name: str, text: str) -> None:
    """Print ``text`` or write it to ``--output``."""
    if getattr(args, "output", None):
        write_atomic(Path(args.output), text)
        logger.info(f"Wrote {name} to {args.output}")
    else:
        sys.stdout.write(text)


# --- Subcommands ---

def cmd_simulate(args) -> int:
    circuit = load_qasm(_circuit_path(args))
    dist = _backend(args).run(circuit)
    _emit(args, "distribution", dist.to_csv(f"{circuit.name}: bit i is qubit i (q0 leftmost)"))
    return 0


def cmd_dataset(args) -> int:
    rows = DatasetService.build_dataset(_corpus(args), _noise(args), args.shots)
    _emit(args, "dataset", DatasetService.to_csv(rows))
    return 0


def cmd_train(args) -> int:
    data = args.data_flag or args.data
    if data is None:
        raise ConfigError("train needs a dataset CSV (positional or --data)")
    rows = DatasetService.read_csv(data)
    settings = get_settings()
    if args.compare:
        train_rows, test_rows = DatasetService.train_test_split(rows, args.train_fraction, args.seed)
        cards = TrainingService.compare_models(
            train_rows, test_rows, _grid(args), args.strength, args.seed
        )
        text = json.dumps({k: v.model_dump() for k, v in cards.items()}, indent=2) + "\n"
        _emit(args, "scorecards", text)
        return 0

    kwargs = {"seed": args.seed}
    if args.degree is not None:
        kwargs["degree"] = args.degree
    if args.family == ModelFamily.LASSO.value:
        kwargs["strength"] = args.strength
    if args.family == ModelFamily.FOREST.value:
        kwargs["n_trees"] = args.trees or settings.forest_trees
    if args.c is not None and args.gamma is not None:
        kwargs.update(c=args.c, gamma=args.gamma)
    model = TrainingService.train(rows, args.family, _grid(args), **kwargs)
    _emit(args, "model", TrainingService.dumps(model))
    return 0


def _grid(args) -> GridSpec:
    settings = get_settings()
    if args.c is not None and args.gamma is not None:
        return GridSpec.single(args.c, args.gamma, settings.cv_folds)
    return GridSpec.coarse_to_fine(settings.cv_folds, args.seed)


def cmd_predict(args) -> int:
    circuit = load_qasm(_circuit_path(args))
    model = TrainingService.load_model(args.model)
    predicted = TrainingService.predict_error(model, circuit)
    features = extract_features(circuit).as_dict()
    print(json.dumps({"circuit": circuit.name, "predicted_error": predicted, "features": features}, indent=2))
    return 0


def cmd_cut(args) -> int:
    circuit = load_qasm(_circuit_path(args))
    if args.threshold is not None or args.plan_out:
        return _cut_plan(args, circuit)
    if args.study:
        if not args.model:
            raise ConfigError("--study needs --model")
        predictor = TrainingService.make_predictor(TrainingService.load_model(args.model))
        rows = cut_study(circuit, predictor, args.max_cut, _backend(args))
        _emit(args, "cut study", "".join(r.model_dump_json() + "\n" for r in rows))
        for r in rows:
            mark = "*" if r.selected else " "
            logger.info(
                f"{mark} {r.label:<40} {r.e_p1:8.2f} {r.e_p2:8.2f} {r.distance:8.2f} "
                f"{r.reconstructed_error:8.3f}"
            )
        return 0

    candidates = FragmentationService.enumerate_cuts(circuit, args.max_cut)
    predictor = None
    if args.model:
        predictor = TrainingService.make_predictor(TrainingService.load_model(args.model))
    lines = []
    scored = FragmentationService.score_cuts(candidates, predictor) if predictor else []
    chosen = (
        FragmentationService.argmin_distance([(s.e_p1, s.e_p2) for s in scored]) if scored else None
    )
    for i, cand in enumerate(candidates):
        entry = {
            "index": i,
            "cut_points": [p.label() for p in cand.cut_points],
            "label": cand.label(),
            "partition": cand.partition_label(),
        }
        if scored:
            entry.update(e_p1=scored[i].e_p1, e_p2=scored[i].e_p2, distance=scored[i].distance)
            entry["selected"] = i == chosen
        lines.append(json.dumps(entry))
    _emit(args, "cuts", "".join(line + "\n" for line in lines))
    logger.info(f"{len(candidates)} valid cuts with K <= {args.max_cut}")
    return 0


def _cut_plan(args, circuit) -> int:
    """Fragment recursively, print the tree summary and write the tree to --plan-out."""
    if not args.model:
        raise ConfigError("cut --threshold/--plan-out needs --model")
    settings = get_settings()
    predictor = TrainingService.make_predictor(TrainingService.load_model(args.model))
    tree = FragmentationService.fragment_recursively(
        circuit,
        predictor,
        args.threshold if args.threshold is not None else settings.threshold,
        args.max_cut,
        args.max_depth if args.max_depth is not None else settings.max_fragment_depth,
    )
    if args.plan_out:
        write_atomic(Path(args.plan_out), FragmentationService.tree_to_json(tree))
        logger.info(f"Wrote fragmentation plan to {args.plan_out}")
    sys.stdout.write(json.dumps(FragmentationService.tree_summary(tree), indent=2) + "\n")
    return 0


def cmd_run(args) -> int:
    settings = get_settings()
    try:
        config = RunConfig(
            circuit_path=_circuit_path(args),
            model_path=args.model,
            threshold=args.threshold if args.threshold is not None else settings.threshold,
            max_cut=args.max_cut,
            max_depth=args.max_depth if args.max_depth is not None else settings.max_fragment_depth,
            shots=args.shots,
            noise_path=args.noise,
            seed=args.seed,
            backend=args.backend or settings.backend,
            out_dir=args.out_dir,
            plan_path=args.plan_out,
        )
    except ValidationError as exc:
        raise ConfigError(f"invalid run configuration: {exc}") from exc
    output = PipelineService.run_pipeline(config)
    report = output.report
    if report.reconstructed is not None:
        logger.info(
            f"E_mean full={report.full_circuit.e_mean:.3f} "
            f"reconstructed={report.reconstructed.e_mean:.3f}"
        )
    for name, path in output.files.items():
        print(f"{name}: {path}")
    return 0


def cmd_bench(args) -> int:
    predictor = TrainingService.make_predictor(TrainingService.load_model(args.model))
    summary = PipelineService.bench_report(
        _corpus(args, cuttable=True), predictor, _backend(args),
        args.threshold, args.max_cut, args.max_depth,
    )
    out_dir = Path(args.out_dir)
    write_atomic(out_dir / "bench.csv", PipelineService.bench_csv(summary))
    sys.stdout.write(PipelineService.bench_table(summary))
    return 0


def cmd_shots_sweep(args) -> int:
    exponents = list(range(args.min_exponent, args.max_exponent + 1))
    result = DatasetService.shots_sweep(_corpus(args), _noise(args), exponents, args.degree)
    _emit(args, "shot sweep", result.model_dump_json(indent=2) + "\n")
    logger.info(f"Best shot count 2^{result.best_exponent} = {result.best_shots}")
    return 0


# --- Parser ---

def _global_args(parser: argparse.ArgumentParser, defaults: bool) -> None:
    """Flags accepted before or after the subcommand.

    Subcommand copies default to SUPPRESS so they only override when given.
    """
    settings = get_settings()

    def default(value):
        return value if defaults else argparse.SUPPRESS

    parser.add_argument("--seed", type=int, default=default(settings.seed))
    parser.add_argument(
        "--noise", type=Path, default=default(None), help="Noise config (JSON or key = value)"
    )
    parser.add_argument("--shots", type=int, default=default(settings.shots))
    parser.add_argument("--out-dir", type=Path, default=default(Path(settings.out_dir)))
    parser.add_argument(
        "--backend", choices=[m.value for m in BackendMode], default=default(None)
    )


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="qfrag", description="Error-prediction-driven quantum circuit fragmentation"
    )
    _global_args(parser, defaults=True)
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    common = argparse.ArgumentParser(add_help=False)
    _global_args(common, defaults=False)
    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    def add(name: str, help_text: str, func) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text, parents=[common])
        sub.set_defaults(func=func)
        return sub

    p = add("simulate", "Execute a circuit and print its distribution", cmd_simulate)
    _add_circuit_args(p)
    p.add_argument("--output", "--out", type=Path)

    p = add("dataset", "Label a corpus with noisy E_mean", cmd_dataset)
    _add_corpus_args(p)
    p.add_argument("--output", "--out", type=Path)

    p = add("train", "Fit an error model on a dataset CSV", cmd_train)
    p.add_argument("data", nargs="?", type=Path, help="Dataset CSV")
    p.add_argument("--data", dest="data_flag", type=Path, help="Same as the positional")
    p.add_argument(
        "--family", "--model", dest="family",
        choices=[f.value for f in ModelFamily], default=ModelFamily.SVR.value,
    )
    p.add_argument("--degree", type=int)
    p.add_argument("--strength", type=float, default=0.1, help="Lasso penalty")
    p.add_argument("--trees", type=int)
    p.add_argument(
        "--grid", choices=["coarse-fine"], default="coarse-fine",
        help="SVR (C, gamma) search; --c with --gamma skips it",
    )
    p.add_argument("--c", type=float, help="SVR penalty")
    p.add_argument("--gamma", type=float)
    p.add_argument("--compare", action="store_true", help="Score all families on a split")
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--output", "--out", type=Path)

    p = add("predict", "Predict a circuit's error percent", cmd_predict)
    _add_circuit_args(p)
    p.add_argument("--model", type=Path, required=True)

    p = add("cut", "List or score cut candidates, or fragment with --threshold", cmd_cut)
    _add_circuit_args(p)
    p.add_argument("--max-cut", type=int, default=settings.max_cut)
    p.add_argument("--model", type=Path)
    p.add_argument("--study", action="store_true", help="Reconstruct through every candidate")
    p.add_argument("--threshold", type=float, help="Fragment recursively below this error")
    p.add_argument("--max-depth", type=int)
    p.add_argument("--plan-out", type=Path, help="Write the fragmentation tree JSON here")
    p.add_argument("--output", "--out", type=Path)

    p = add("run", "Predict, fragment, execute and reconstruct", cmd_run)
    _add_circuit_args(p)
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--max-cut", type=int, default=settings.max_cut)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--plan-out", type=Path, help="Also write the fragmentation tree JSON here")

    p = add("bench", "Full vs reconstructed error over a corpus", cmd_bench)
    _add_corpus_args(p)
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--max-cut", type=int, default=settings.max_cut)
    p.add_argument("--max-depth", type=int)

    p = add("shots-sweep", "Mean error against log2(shots)", cmd_shots_sweep)
    _add_corpus_args(p)
    p.add_argument("--min-exponent", type=int, default=1)
    p.add_argument("--max-exponent", type=int, default=13)
    p.add_argument("--degree", type=int)
    p.add_argument("--output", "--out", type=Path)

    return parser


def main(argv: list[str] | None = None) -> int:
    """Run one subcommand; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else get_settings().log_level
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    if not getattr(args, "func", None):
        parser.print_help()
        return 0
    try:
        if args.shots < 1:
            raise ConfigError(f"--shots must be >= 1, got {args.shots}")
        return args.func(args)
    except QFragError as exc:
        logger.error(str(exc))
        return exc.exit_code
