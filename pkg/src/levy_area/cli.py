import argparse
import logging
import sys
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from levy_area.core.config import Settings, load_settings
from levy_area.core.coupling_oracle import convergence_study
from levy_area.core.data_loader import DataLoader
from levy_area.core.errors import ConfigurationError, LevyAreaError
from levy_area.core.gaussian_source import GaussianSource, entropy_seed
from levy_area.core.integrals import (
    QWienerSpec,
    default_eps,
    iterated_integrals,
    qwiener_plan,
    simulate_qwiener,
    simulation_plan,
)
from levy_area.core.selection import CostReport, SelectionQuery, cost, cutoff
from levy_area.core.types import AlgorithmId, ErrorNorm, WienerIncrement

logger = logging.getLogger(__name__)

COMMANDS = ("simulate", "optimal", "convergence", "bench")
AUTO = "auto"
DEFAULT_STEPSIZES = tuple(10.0**-k for k in range(9))
CONVERGENCE_COLUMNS = ("alg", "m", "h", "p", "cost", "error_est", "error_se", "bound", "reps", "seed")
BENCH_COLUMNS = ("alg", "m", "h", "p", "wall_ns_mean", "wall_ns_min", "reps")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        # one diagnostic line, exit status 2
        self.exit(2, f"{self.prog}: usage error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    m: int
    h: float
    eps: Optional[float]
    norm: ErrorNorm
    # None selects automatically
    alg: Optional[AlgorithmId]
    p: Optional[int]
    seed: int
    reps: int
    qwiener_file: Optional[str]
    output: Optional[str]
    p_min: int = 4
    p_max: int = 1024
    p_ref: int = 10**6
    workers: int = 1
    stepsizes: Tuple[float, ...] = DEFAULT_STEPSIZES
    warmup: int = 3

    @property
    def effective_eps(self) -> float:
        return default_eps(self.h) if self.eps is None else self.eps

    def algorithms(self) -> List[AlgorithmId]:
        """The fixed algorithm, or all four in automatic mode."""
        return list(AlgorithmId) if self.alg is None else [self.alg]

    @classmethod
    def from_args(cls, args: argparse.Namespace, settings: Settings) -> "RunConfig":
        if args.dim < 1:
            raise ConfigurationError(f"--dim must be at least 1, got {args.dim}")
        if args.stepsize <= 0.0:
            raise ConfigurationError(f"--stepsize must be positive, got {args.stepsize}")
        if args.eps is not None and args.eps <= 0.0:
            raise ConfigurationError(f"--eps must be positive, got {args.eps}")
        if args.p is not None and args.p < 1:
            raise ConfigurationError(f"--p must be at least 1, got {args.p}")

        if args.norm is not None:
            norm = ErrorNorm.from_name(args.norm)
        elif args.qwiener_file is not None:
            norm = ErrorNorm.FROBENIUS_L2
        else:
            norm = ErrorNorm.MAX_L2

        seed = args.seed
        if seed is None:
            seed = settings.seed if settings.seed is not None else entropy_seed()

        extra = {}
        if args.command == "convergence":
            extra = dict(
                p_min=args.p_min,
                p_max=args.p_max,
                p_ref=settings.p_ref if args.p_ref is None else args.p_ref,
                workers=args.workers,
            )
        elif args.command == "bench":
            extra = dict(stepsizes=args.stepsizes or DEFAULT_STEPSIZES, warmup=args.warmup)

        return cls(
            subcommand=args.command,
            m=args.dim,
            h=args.stepsize,
            eps=args.eps,
            norm=norm,
            alg=None if args.alg == AUTO else AlgorithmId.from_name(args.alg),
            p=args.p,
            seed=seed,
            reps=args.reps,
            qwiener_file=args.qwiener_file,
            output=args.output,
            **extra,
        )


def _stepsize_list(raw: str) -> Tuple[float, ...]:
    try:
        values = tuple(float(item) for item in raw.split(",") if item.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: '{raw}'") from None
    if not values or any(value <= 0.0 for value in values):
        raise argparse.ArgumentTypeError(f"step sizes must be positive: '{raw}'")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, required=True, help="dimension m of the Wiener process")
    common.add_argument("--stepsize", type=float, default=1.0, help="step size h")
    common.add_argument("--eps", type=float, help="precision, defaults to h^(3/2)")
    common.add_argument("--norm", type=str.lower, choices=[n.value for n in ErrorNorm])
    common.add_argument("--alg", type=str.lower, default=AUTO, choices=[AUTO] + [a.value for a in AlgorithmId])
    common.add_argument("--p", type=int, help="truncation parameter, bypasses --eps")
    common.add_argument("--seed", type=int, help="64-bit root seed, drawn from entropy when omitted")
    common.add_argument("--qwiener-file", help="Q-Wiener eigenvalues, one per line")
    common.add_argument("--output", help="write the CSV here instead of standard output")
    common.add_argument("--log-level", type=str.upper, choices=LOG_LEVELS, help="logging level on standard error")

    parser = _ArgumentParser(
        prog="levy-area",
        description="Simulate iterated Ito integrals and Levy areas of a multidimensional Wiener process.",
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    simulate = commands.add_parser("simulate", parents=[common], help="simulate one matrix I(h)")
    simulate.add_argument("--reps", type=int, default=1, help=argparse.SUPPRESS)

    optimal = commands.add_parser("optimal", parents=[common], help="cheapest algorithm and cut-off")
    optimal.add_argument("--reps", type=int, default=1, help=argparse.SUPPRESS)

    convergence = commands.add_parser("convergence", parents=[common], help="Monte-Carlo error study")
    convergence.add_argument("--reps", type=int, default=100)
    convergence.add_argument("--p-min", type=int, default=4)
    convergence.add_argument("--p-max", type=int, default=1024)
    convergence.add_argument("--p-ref", type=int)
    convergence.add_argument("--workers", type=int, default=1)

    bench = commands.add_parser("bench", parents=[common], help="time I(h) generation over step sizes")
    bench.add_argument("--reps", type=int, default=10)
    bench.add_argument("--stepsizes", type=_stepsize_list, help="comma-separated, default 1,1e-1,...,1e-8")
    bench.add_argument("--warmup", type=int, default=3)
    return parser


def _seed_header(cfg: RunConfig, plan: CostReport, **extra) -> dict:
    header = dict(
        command=cfg.subcommand,
        m=cfg.m,
        h=cfg.h,
        eps=cfg.effective_eps,
        norm=cfg.norm.value,
        algorithm=plan.algorithm.value,
        p=plan.p,
    )
    header.update(extra)
    header["seed"] = cfg.seed
    return header


def cmd_simulate(cfg: RunConfig, settings: Optional[Settings] = None) -> str:
    """One matrix I(h), a row per line, after a provenance header."""
    src = GaussianSource(cfg.seed)
    kernel = (settings or Settings()).kernel_config()

    if cfg.qwiener_file is not None:
        if cfg.p is not None:
            raise ConfigurationError("--p cannot be combined with --qwiener-file")
        spec = QWienerSpec.from_eigenvalues(DataLoader.read_eigenvalues(cfg.qwiener_file, cfg.m))
        plan = qwiener_plan(spec, cfg.h, cfg.effective_eps, cfg.norm, cfg.alg)
        qw = WienerIncrement(spec.sqrt_eigenvalues * WienerIncrement.sample(cfg.m, cfg.h, src).values, cfg.h)
        before = src.draw_count
        integrals = simulate_qwiener(qw, spec, cfg.effective_eps, cfg.norm, src, cfg=kernel, plan=plan)
        extra = dict(qwiener_file=cfg.qwiener_file)
    else:
        plan = simulation_plan(cfg.m, cfg.h, cfg.eps, cfg.norm, cfg.alg)
        if cfg.p is not None:
            plan = CostReport(plan.algorithm, cfg.p, 0 if cfg.m == 1 else cost(plan.algorithm, cfg.m, cfg.p))
        w = WienerIncrement.sample(cfg.m, cfg.h, src)
        before = src.draw_count
        integrals = iterated_integrals(w, plan.p, plan.algorithm, kernel, src)
        extra = {}

    header = _seed_header(cfg, plan, gaussians=src.draw_count - before, **extra)
    return DataLoader.format_csv(integrals.entries.tolist(), header=header)


def cmd_optimal(cfg: RunConfig, settings: Optional[Settings] = None) -> str:
    """Single line 'algorithm,p,gaussians'."""
    plan = simulation_plan(cfg.m, cfg.h, cfg.eps, cfg.norm, cfg.alg)
    return DataLoader.format_csv([[plan.algorithm.value, plan.p, plan.gaussians]])


def _dyadic_grid(p_min: int, p_max: int) -> List[int]:
    if p_min < 1 or p_max < p_min:
        raise ConfigurationError(f"Need 1 <= --p-min <= --p-max, got {p_min} and {p_max}")
    grid = []
    p = p_min
    while p <= p_max:
        grid.append(p)
        p *= 2
    return grid


def cmd_convergence(cfg: RunConfig, settings: Optional[Settings] = None) -> str:
    """One CSV row per (algorithm, p) on the dyadic grid p_min, 2 p_min, ... <= p_max."""
    if cfg.reps < 2:
        raise ConfigurationError(f"--reps must be at least 2 for a convergence study, got {cfg.reps}")
    ps = [cfg.p] if cfg.p is not None else _dyadic_grid(cfg.p_min, cfg.p_max)
    if max(ps) >= cfg.p_ref:
        raise ConfigurationError(f"Truncation parameters must stay below --p-ref={cfg.p_ref}, got {max(ps)}")

    settings = settings or Settings()
    rows = convergence_study(
        cfg.algorithms(),
        cfg.m,
        ps,
        cfg.p_ref,
        cfg.reps,
        norm=cfg.norm,
        seed=cfg.seed,
        h=cfg.h,
        workers=cfg.workers,
        cfg=settings.kernel_config(),
        clamp=settings.clamp,
    )
    records = [
        [row.algorithm.value, row.m, row.h, row.p, row.cost, row.error_est, row.error_se, row.bound, row.reps, row.seed]
        for row in rows
    ]
    header = dict(command=cfg.subcommand, norm=cfg.norm.value, p_ref=cfg.p_ref, seed=cfg.seed)
    return DataLoader.format_csv(records, columns=CONVERGENCE_COLUMNS, header=header)


def _time_ns(run, reps: int, warmup: int) -> Tuple[float, int]:
    for _ in range(warmup):
        run()
    timings = []
    for _ in range(reps):
        start = time.perf_counter_ns()
        run()
        timings.append(time.perf_counter_ns() - start)
    return float(np.mean(timings)), int(np.min(timings))


def cmd_bench(cfg: RunConfig, settings: Optional[Settings] = None) -> str:
    """Wall-clock time of one I(h) per algorithm and step size, p from the cut-off."""
    if cfg.reps < 1 or cfg.warmup < 0:
        raise ConfigurationError("--reps must be positive and --warmup non-negative")
    kernel = (settings or Settings()).kernel_config()
    src = GaussianSource(cfg.seed)

    records = []
    for h in cfg.stepsizes:
        w = WienerIncrement.sample(cfg.m, h, src)
        eps = default_eps(h) if cfg.eps is None else cfg.eps
        for alg in cfg.algorithms():
            p = cfg.p or cutoff(alg, SelectionQuery(m=cfg.m, h=h, eps=eps, norm=cfg.norm))
            logger.debug("Benchmarking %s m=%d h=%g p=%d", alg.value, cfg.m, h, p)
            mean_ns, min_ns = _time_ns(lambda: iterated_integrals(w, p, alg, kernel, src), cfg.reps, cfg.warmup)
            records.append([alg.value, cfg.m, h, p, mean_ns, min_ns, cfg.reps])

    header = dict(command=cfg.subcommand, norm=cfg.norm.value, seed=cfg.seed)
    return DataLoader.format_csv(records, columns=BENCH_COLUMNS, header=header)


COMMAND_MAP = {
    "simulate": cmd_simulate,
    "optimal": cmd_optimal,
    "convergence": cmd_convergence,
    "bench": cmd_bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings()
        logging.basicConfig(
            level=args.log_level or settings.log_level,
            stream=sys.stderr,
            format="%(levelname)s %(name)s: %(message)s",
        )
        cfg = RunConfig.from_args(args, settings)
        text = COMMAND_MAP[cfg.subcommand](cfg, settings)
        if cfg.output is not None:
            DataLoader.write_utf8_file(cfg.output, text)
        else:
            sys.stdout.write(text)
    except (LevyAreaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
