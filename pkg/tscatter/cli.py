# Copyright 2024 The tscatter Authors. All rights reserved.

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     http://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Command line entry point.

    tscatter resonances --end=funnel:0 --radius=10
    tscatter grid --op=smatrix --mode=0,1 --re=-2:2:81 --im=-3:3:121 --plot=grid.png
    tscatter winding --target=reduced --mode=0,0 --center=-1 --contour_radius=0.2
    tscatter verify --suite=full --report_dir=logs
    tscatter count --end=funnel:0 --radius=50

Exit codes: 0 success, 1 failed verification, 2 invalid input, 3 numerical failure.
"""

import contextlib
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, List, Optional, Sequence, TextIO, Tuple

import numpy as np
from absl import app, flags, logging

from tscatter.config import Config, load_config, serialize_config
from tscatter.cusp import cusp_poisson
from tscatter.ends import (
    FunnelTwist,
    ModeIndex,
    ResonanceMultiset,
    cusp_resonances,
    funnel_resonances,
    mode_resonances,
)
from tscatter.errors import ConfigError, NumericalError, PoleProximity, TScatterError
from tscatter.funnel import (
    normalized_smatrix_coeff,
    poisson_coeff,
    reduced_smatrix_coeff,
    smatrix_coeff,
    symbol_leading,
)
from tscatter.gs import Contour, guard_mode_contour, scalar_winding
from tscatter.loggers import BaseLogger, JsonWriter, TerminalLogger, WandbLogger
from tscatter.plotting import plot_grid
from tscatter.verify import DEFAULT_SEED, SUITES, run_suite
from tscatter.weierstrass import TruncatedProduct, counting_function, product_eval

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

COMMANDS = ("resonances", "grid", "winding", "verify", "count")
GRID_OPS = ("smatrix", "reduced", "symbol", "poisson", "product")
WINDING_TARGETS = ("reduced", "normalized", "smatrix", "product")

FLAGS = flags.FLAGS
flags.DEFINE_string("config", None, "JSON surface config; the default funnel if unset.")
flags.DEFINE_string("out", None, "Output file; stdout if unset.")
flags.DEFINE_string("end", "funnel:0", "End selector, funnel:<i> or cusp:<i>.")
flags.DEFINE_float("radius", 10.0, "Disk radius for resonances, count and product.")
flags.DEFINE_string("mode", None, "Fourier mode j,k of the selected funnel.")
flags.DEFINE_string("op", "smatrix", f"Grid operation: {', '.join(GRID_OPS)}.")
flags.DEFINE_string("re", "-2:2:41", "Real parts of the grid, start:stop:count.")
flags.DEFINE_string("im", "-2:2:41", "Imaginary parts of the grid, start:stop:count.")
flags.DEFINE_float("r", 1.0, "Radial coordinate for the poisson grid operation.")
flags.DEFINE_string("points", None, "Explicit product zeros, e.g. '-1:1;-3+2i:2'.")
flags.DEFINE_float("exclusion", 0.05, "Grid nodes this close to a pole are written as NaN.")
flags.DEFINE_integer("workers", 1, "Threads for grid rows and verification checks.")
flags.DEFINE_string("plot", None, "Save a modulus/phase figure of the grid to this path.")
flags.DEFINE_string("target", "reduced", f"Winding target: {', '.join(WINDING_TARGETS)}.")
flags.DEFINE_string("center", "0", "Contour center, e.g. -1+0.3i.")
flags.DEFINE_float("contour_radius", 0.2, "Contour radius.")
flags.DEFINE_integer("nodes", 256, "Contour nodes.")
flags.DEFINE_string("suite", "full", f"Verification suite: {', '.join(SUITES)}.")
flags.DEFINE_integer("seed", DEFAULT_SEED, "Seed of the verification sample grids.")
flags.DEFINE_string("report_dir", None, "Directory of the merged verify.json report.")
flags.DEFINE_string("wandb_project", None, "Log verification results to this wandb project.")
flags.DEFINE_float("perturb", 0.0, "Scale the numerator beta by 1 + perturb (mutation test).")


###############
### Parsing ###
###############


def parse_end(text: str) -> Tuple[str, int]:
    kind, _, index = text.partition(":")
    if kind not in ("funnel", "cusp") or not index.isdigit():
        raise ConfigError(f"End selector {text} not recognised; use funnel:<i> or cusp:<i>.")
    return kind, int(index)


def parse_mode(text: str) -> Tuple[int, int]:
    try:
        j, k = (int(part) for part in text.split(","))
    except ValueError as err:
        raise ConfigError(f"mode must look like j,k, got {text!r}") from err
    return j, k


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as err:
        raise ConfigError(f"invalid complex number {text!r}") from err


def parse_range(text: str) -> np.ndarray:
    """start:stop:count as an inclusive linspace."""
    try:
        start, stop, count = text.split(":")
        values = np.linspace(float(start), float(stop), int(count))
    except ValueError as err:
        raise ConfigError(f"range must look like start:stop:count, got {text!r}") from err
    if len(values) == 0:
        raise ConfigError(f"range {text!r} is empty")
    return values


def parse_points(text: str) -> ResonanceMultiset:
    entries = []
    for item in filter(None, (part.strip() for part in text.split(";"))):
        point, _, mult = item.rpartition(":")
        try:
            entries.append((parse_complex(point), int(mult)))
        except ValueError as err:
            raise ConfigError(f"invalid product point {item!r}") from err
    return ResonanceMultiset(entries)


def select_mode(config: Config, end: str, mode: Optional[str]) -> ModeIndex:
    kind, index = parse_end(end)
    if kind != "funnel":
        raise ConfigError("Fourier modes belong to funnel ends")
    j, k = parse_mode(mode or "0,0")
    return config.ends.mode(index, j, k)


def _funnel(config: Config, index: int) -> FunnelTwist:
    if not 0 <= index < config.ends.n_f:
        raise ConfigError(f"funnel index {index} out of range for {config.ends.n_f} funnels")
    return config.ends.funnels[index]


##############
### Output ###
##############


def format_number(value: float) -> str:
    return "%.17g" % value


def write_rows(out: TextIO, header: str, rows: Sequence[Sequence[float]]) -> None:
    out.write(header + "\n")
    for row in rows:
        out.write(",".join(format_number(v) for v in row) + "\n")


@contextlib.contextmanager
def open_output(path: Optional[str]) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", newline="\n") as f:
        yield f


################
### Commands ###
################


def cmd_resonances(
    config: Config,
    end: str = "funnel:0",
    radius: float = 10.0,
    mode: Optional[str] = None,
    out: TextIO = sys.stdout,
) -> int:
    """Writes `re,im,multiplicity` rows ordered by (|s|, Re, Im)."""
    kind, index = parse_end(end)
    if not radius > 0:
        raise ConfigError(f"radius must be positive, got {radius}")
    if kind == "cusp":
        if not 0 <= index < config.ends.n_c:
            raise ConfigError(f"cusp index {index} out of range for {config.ends.n_c} cusps")
        multiset = cusp_resonances(config.ends.cusps[index]).within(radius)
    elif mode is not None:
        multiset = mode_resonances(select_mode(config, end, mode), int(radius)).within(radius)
    else:
        multiset = funnel_resonances(_funnel(config, index), radius)

    rows: List[Tuple[float, float, int]] = []
    if multiset.m0:
        rows.append((0.0, 0.0, multiset.m0))
    rows.extend((p.real, p.imag, m) for p, m in multiset)
    write_rows(out, "re,im,multiplicity", rows)
    return EXIT_OK


def grid_function(
    config: Config,
    op: str,
    end: str = "funnel:0",
    mode: Optional[str] = None,
    r: float = 1.0,
    radius: float = 10.0,
    points: Optional[str] = None,
) -> Tuple[Callable[[complex], complex], Callable[[int], List[complex]]]:
    """The evaluated function of a grid op, and its poles up to a lattice index."""
    options = config.options
    if op not in GRID_OPS:
        raise ConfigError(f"Grid operation {op} not recognised.")

    if op == "product":
        if points is not None:
            multiset = parse_points(points)
        else:
            multiset = funnel_resonances(_funnel(config, parse_end(end)[1]), radius)
        product = TruncatedProduct(multiset, max(multiset.max_modulus(), 1.0))
        return lambda s: product_eval(product, s, options), lambda _: []

    kind, _ = parse_end(end)
    if kind == "cusp" and op == "poisson":
        return lambda s: cusp_poisson(s, r, options), lambda _: [0.5 + 0j]

    index = select_mode(config, end, mode)

    def poles(max_index: int) -> List[complex]:
        return [p for p, _ in mode_resonances(index, max_index)]

    if op == "smatrix":
        return lambda s: smatrix_coeff(index, s, options), poles
    elif op == "reduced":
        return lambda s: reduced_smatrix_coeff(index, s, options), poles
    elif op == "symbol":
        return lambda s: symbol_leading(index, s, options), lambda _: []
    else:
        return lambda s: poisson_coeff(index, s, r, options), poles


def cmd_grid(
    config: Config,
    op: str = "smatrix",
    re: str = "-2:2:41",
    im: str = "-2:2:41",
    end: str = "funnel:0",
    mode: Optional[str] = None,
    r: float = 1.0,
    radius: float = 10.0,
    points: Optional[str] = None,
    exclusion: float = 0.05,
    workers: int = 1,
    plot: Optional[str] = None,
    out: TextIO = sys.stdout,
) -> int:
    """Writes `re_s,im_s,re_val,im_val` rows, one grid row per imaginary part.

    Nodes within `exclusion` of a pole, or on a pole of a Gamma factor, are NaN.
    """
    re_values = parse_range(re)
    im_values = parse_range(im)
    fn, poles = grid_function(config, op, end, mode, r, radius, points)
    reach = float(np.max(np.abs(re_values)))
    excluded = poles(int(reach / 2) + 2)

    def evaluate(s: complex) -> complex:
        if any(abs(s - p) < exclusion for p in excluded):
            return complex(math.nan, math.nan)
        try:
            return complex(fn(s))
        except PoleProximity:
            return complex(math.nan, math.nan)

    def row(y: float) -> List[complex]:
        return [evaluate(complex(x, y)) for x in re_values]

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(row, im_values))
    else:
        values = [row(y) for y in im_values]

    rows = [
        (x, y, v.real, v.imag)
        for y, line in zip(im_values, values)
        for x, v in zip(re_values, line)
    ]
    write_rows(out, "re_s,im_s,re_val,im_val", rows)

    if plot is not None:
        plot_grid(re_values, im_values, np.array(values), plot, title=f"{op} on {end}")
    return EXIT_OK


def cmd_winding(
    config: Config,
    target: str = "reduced",
    center: str = "0",
    radius: float = 0.2,
    nodes: int = 256,
    end: str = "funnel:0",
    mode: Optional[str] = None,
    points: Optional[str] = None,
    out: TextIO = sys.stdout,
) -> int:
    """Prints the winding number of the target around the circle."""
    contour = Contour(parse_complex(center), radius, nodes)
    options = config.options
    if target not in WINDING_TARGETS:
        raise ConfigError(f"Winding target {target} not recognised.")

    fn: Callable[[complex], complex]
    if target == "product":
        fn, _ = grid_function(
            config, "product", end, points=points, radius=abs(contour.center) + radius + 1.0
        )
    else:
        index = select_mode(config, end, mode)
        guard_mode_contour(index, contour)
        if target == "reduced":
            fn = lambda s: reduced_smatrix_coeff(index, s, options)
        elif target == "normalized":
            fn = lambda s: normalized_smatrix_coeff(index, s, options)
        else:
            fn = lambda s: smatrix_coeff(index, s, options)

    out.write(f"{scalar_winding(fn, contour)}\n")
    return EXIT_OK


def cmd_count(
    config: Config, end: str = "funnel:0", radius: float = 10.0, out: TextIO = sys.stdout
) -> int:
    """Writes `r,count,count_over_r2` for the selected end, or for every end with `all`."""
    if not radius > 0:
        raise ConfigError(f"radius must be positive, got {radius}")
    if end == "all":
        count = sum(counting_function(f, radius) for f in config.ends.funnels)
        count += sum(cusp_resonances(c).within(radius).total() for c in config.ends.cusps)
    else:
        kind, index = parse_end(end)
        if kind == "cusp":
            if not 0 <= index < config.ends.n_c:
                raise ConfigError(f"cusp index {index} out of range for {config.ends.n_c} cusps")
            count = cusp_resonances(config.ends.cusps[index]).within(radius).total()
        else:
            count = counting_function(_funnel(config, index), radius)
    write_rows(out, "r,count,count_over_r2", [(radius, count, count / radius**2)])
    return EXIT_OK


def cmd_verify(
    config: Config,
    suite: str = "full",
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    report_dir: Optional[str] = None,
    wandb_project: Optional[str] = None,
    out: TextIO = sys.stdout,
) -> int:
    """Runs a verification suite and writes its reports as a JSON list."""
    if suite not in SUITES:
        raise ConfigError(f"Suite {suite} not recognised; expected one of {', '.join(SUITES)}.")

    logger: BaseLogger
    if wandb_project is not None:
        run_config = {"config": serialize_config(config), "suite": suite, "seed": seed}
        logger = WandbLogger(config=run_config, project=wandb_project, notes=config.name)
    else:
        logger = TerminalLogger()
    json_writer = None
    if report_dir is not None:
        json_writer = JsonWriter(
            report_dir, config.name, suite, seed, save_to_wandb=wandb_project is not None
        )

    try:
        reports = run_suite(config.ends, suite, config.options, seed, logger, json_writer, workers)
    finally:
        if json_writer is not None:
            json_writer.close()
        logger.close()

    json.dump([report.as_dict() for report in reports], out, indent=2)
    out.write("\n")
    return EXIT_OK if all(report.passed for report in reports) else EXIT_FAILED


def run_guarded(command: Callable[[], int]) -> int:
    """Maps library errors to exit codes."""
    try:
        return command()
    except NumericalError as err:
        logging.error("%s: %s", type(err).__name__, err)
        return EXIT_NUMERICAL
    except (TScatterError, ValueError) as err:
        logging.error("%s: %s", type(err).__name__, err)
        return EXIT_INVALID


def _dispatch(command: str) -> int:
    config = load_config(FLAGS.config)
    if FLAGS.perturb:
        options = config.options.replace(beta_perturbation=FLAGS.perturb)
        config = Config(config.ends, options, config.name)

    with open_output(FLAGS.out) as out:
        if command == "resonances":
            return cmd_resonances(config, FLAGS.end, FLAGS.radius, FLAGS.mode, out)
        elif command == "grid":
            return cmd_grid(
                config,
                FLAGS.op,
                FLAGS.re,
                FLAGS.im,
                FLAGS.end,
                FLAGS.mode,
                FLAGS.r,
                FLAGS.radius,
                FLAGS.points,
                FLAGS.exclusion,
                FLAGS.workers,
                FLAGS.plot,
                out,
            )
        elif command == "winding":
            return cmd_winding(
                config,
                FLAGS.target,
                FLAGS.center,
                FLAGS.contour_radius,
                FLAGS.nodes,
                FLAGS.end,
                FLAGS.mode,
                FLAGS.points,
                out,
            )
        elif command == "count":
            return cmd_count(config, FLAGS.end, FLAGS.radius, out)
        else:
            return cmd_verify(
                config,
                FLAGS.suite,
                FLAGS.seed,
                FLAGS.workers,
                FLAGS.report_dir,
                FLAGS.wandb_project,
                out,
            )


def main(argv: Sequence[str]) -> int:
    if len(argv) != 2 or argv[1] not in COMMANDS:
        print(f"usage: tscatter {{{','.join(COMMANDS)}}} [--flags]", file=sys.stderr)
        return EXIT_INVALID
    return run_guarded(lambda: _dispatch(argv[1]))


def run() -> None:
    app.run(main)


if __name__ == "__main__":
    run()
