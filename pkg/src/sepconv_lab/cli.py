"""Command line driver: gen, convolve, ladder, and overhead.

Commands run in process by default. With --server URL the same commands act
as a thin client of a running sepconv-lab HTTP service: files are read and
written locally, the computation and timing happen on the server.

Exit codes: 0 success, 1 operational error (including usage), 2 correctness
failure detected during a ladder run.
"""

from __future__ import annotations

import argparse
import base64
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import httpx

from .bench import LadderConfig, emit_csv, run_ladder
from .conv import Algorithm, ConvVariant
from .errors import SepconvError
from .executors import (
    ExecPlan,
    TaskPool,
    convolve_image,
    empty_task_overhead,
    make_plan,
    result_image,
)
from .image import Image, make_synthetic
from .kernels import SeparableKernel, gaussian5
from .ppm import read_ppm, write_ppm

REFERENCE_SIZES = ((1152, 1152), (1728, 1728), (2592, 2592), (3888, 3888), (5832, 5832), (8748, 8748))
DESK_SIZES = ((256, 256), (512, 512), (1024, 1024))

DESK_ENV_VAR = "SEPCONV_DESK"


@dataclass
class Config:
    command: str
    sizes: tuple[tuple[int, int], ...] = REFERENCE_SIZES
    planes: int = 3
    seed: int = 42
    reps: int = 1000
    workers: int = 100
    cutoff: int = 100
    agglomerate: bool = False
    algorithm: str = "two-pass"
    copy_back: bool = True
    kernel: tuple[float, ...] | None = None  # None means gaussian5
    plan_mode: str = "sequential"
    vectorized: bool = True
    input_path: str | None = None
    output_path: str | None = None
    csv_out: str | None = None
    stages: tuple[str, ...] | None = None
    server: str | None = None
    host: str = "127.0.0.1"
    port: int = 8000


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on usage errors instead of 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_sizes(text: str) -> tuple[tuple[int, int], ...]:
    sizes = []
    for token in text.split(","):
        parts = token.lower().split("x")
        if len(parts) != 2 or not parts[0].isdigit() or not parts[1].isdigit():
            raise argparse.ArgumentTypeError(f"malformed size {token!r}, expected ROWSxCOLS")
        sizes.append((int(parts[0]), int(parts[1])))
    return tuple(sizes)


def _parse_kernel(text: str) -> tuple[float, ...] | None:
    if text == "gaussian5":
        return None
    try:
        weights = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed kernel {text!r}") from None
    if len(weights) % 2 == 0:
        raise argparse.ArgumentTypeError("kernel width must be odd")
    return weights


def _default_sizes() -> tuple[tuple[int, int], ...]:
    if os.environ.get(DESK_ENV_VAR) == "1":
        return DESK_SIZES
    return REFERENCE_SIZES


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sizes", type=_parse_sizes, default=None,
                        help="comma-separated ROWSxCOLS list (default: the six reference squares)")
    parser.add_argument("--planes", type=int, default=3)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--reps", type=int, default=1000)
    parser.add_argument("--workers", type=int, default=100)
    parser.add_argument("--cutoff", type=int, default=100)
    parser.add_argument("--kernel", type=_parse_kernel, default=None,
                        help='"gaussian5" or comma-separated weights, used verbatim')
    parser.add_argument("--server", default=None, metavar="URL",
                        help="send the command to a running sepconv-lab service")


def build_parser() -> _Parser:
    parser = _Parser(prog="sepconv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="write a synthetic PPM image")
    _add_common(gen)
    gen.add_argument("--out", required=True, help="output PPM path")

    conv = sub.add_parser("convolve", help="convolve one image")
    _add_common(conv)
    conv.add_argument("--in", dest="input_path", default=None, help="input PPM (default: synthetic)")
    conv.add_argument("--out", default=None, help="output PPM path")
    conv.add_argument("--algorithm", choices=[a.value for a in Algorithm], default="two-pass")
    conv.add_argument("--no-copy-back", action="store_true",
                      help="leave the single-pass result in the destination buffer")
    conv.add_argument("--plan", choices=["sequential", "static", "taskpool"], default="sequential")
    conv.add_argument("--agglomerate", action="store_true")
    conv.add_argument("--no-vec", action="store_true", help="use the scalar backend")

    ladder = sub.add_parser("ladder", help="run the optimisation ladder")
    _add_common(ladder)
    ladder.add_argument("--csv", dest="csv_out", default=None, help="CSV path (default: stdout)")
    ladder.add_argument("--stages", default=None,
                        help="comma-separated stage labels (default: full ladder)")

    over = sub.add_parser("overhead",
                          help="measure empty-task launch overhead (reps launches)")
    _add_common(over)
    over.add_argument("--agglomerate", action="store_true")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def parse_args(argv: list[str] | None = None) -> Config:
    ns = build_parser().parse_args(argv)
    explicit_sizes = getattr(ns, "sizes", None)
    return Config(
        command=ns.command,
        sizes=explicit_sizes if explicit_sizes is not None else _default_sizes(),
        planes=getattr(ns, "planes", 3),
        seed=getattr(ns, "seed", 42),
        reps=getattr(ns, "reps", 1000),
        workers=getattr(ns, "workers", 100),
        cutoff=getattr(ns, "cutoff", 100),
        agglomerate=getattr(ns, "agglomerate", False),
        algorithm=getattr(ns, "algorithm", "two-pass"),
        copy_back=not getattr(ns, "no_copy_back", False),
        kernel=getattr(ns, "kernel", None),
        plan_mode=getattr(ns, "plan", "sequential"),
        vectorized=not getattr(ns, "no_vec", False),
        input_path=getattr(ns, "input_path", None),
        output_path=getattr(ns, "out", None),
        csv_out=getattr(ns, "csv_out", None),
        stages=tuple(getattr(ns, "stages").split(",")) if getattr(ns, "stages", None) else None,
        server=getattr(ns, "server", None),
        host=getattr(ns, "host", "127.0.0.1"),
        port=getattr(ns, "port", 8000),
    )


def _kernel_of(config: Config) -> SeparableKernel:
    if config.kernel is None:
        return gaussian5()
    return SeparableKernel(list(config.kernel))


def _plan_of(config: Config) -> ExecPlan:
    return make_plan(config.plan_mode, config.workers, config.cutoff, config.agglomerate)


def _source_image(config: Config) -> Image:
    if config.input_path is not None:
        return read_ppm(config.input_path)
    rows, cols = config.sizes[0]
    return make_synthetic(rows, cols, config.planes, config.seed)


def _cmd_gen(config: Config) -> int:
    rows, cols = config.sizes[0]
    image = make_synthetic(rows, cols, config.planes, config.seed)
    write_ppm(image, config.output_path)
    print(f"wrote {config.output_path} ({rows}x{cols}, {config.planes} planes, seed {config.seed})")
    return 0


def _cmd_convolve(config: Config) -> int:
    image = _source_image(config)
    kernel = _kernel_of(config)
    variant = ConvVariant(Algorithm(config.algorithm), copy_back=config.copy_back)
    plan = _plan_of(config)
    workspace = Image.zeros_like(image)
    stats = convolve_image(
        image, kernel, variant, plan, vectorized=config.vectorized, workspace=workspace
    )
    out = result_image(image, workspace, variant)
    if config.output_path is not None:
        write_ppm(out, config.output_path)
    print(
        f"convolved {image.rows}x{image.cols}x{image.plane_count} "
        f"[{variant.algorithm.value}, {config.plan_mode}] "
        f"launches={stats.parallel_region_launches} tasks={stats.tasks_spawned} "
        f"wall={stats.wall_time_ns / 1e6:.3f} ms"
    )
    return 0


def _cmd_ladder(config: Config) -> int:
    ladder_config = LadderConfig(
        sizes=config.sizes,
        planes=config.planes,
        seed=config.seed,
        reps=config.reps,
        workers=config.workers,
        cutoff=config.cutoff,
        stages=config.stages,
    )
    result = run_ladder(ladder_config)
    if config.csv_out is not None:
        emit_csv(result.records, config.csv_out)
        print(f"wrote {len(result.records)} records to {config.csv_out}")
    else:
        emit_csv(result.records, sys.stdout)
    if result.failures:
        for failure in result.failures:
            print(
                f"correctness failure: {failure.label} on {failure.rows}x{failure.cols}: "
                f"{failure.detail}",
                file=sys.stderr,
            )
        return 2
    return 0


def _cmd_serve(config: Config) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=config.host, port=config.port)
    return 0


def _cmd_overhead(config: Config) -> int:
    plan = TaskPool(workers=config.workers, cutoff=config.cutoff, agglomerate=config.agglomerate)
    per_launch = empty_task_overhead(plan, config.reps)
    print(
        f"per-launch overhead: {per_launch / 1e6:.6f} ms "
        f"({config.reps} launches of {config.cutoff} empty tasks on {plan.effective_workers()} workers)"
    )
    return 0


# --- thin client -----------------------------------------------------------

def _open_client(base_url: str) -> httpx.Client:
    return httpx.Client(base_url=base_url, timeout=600.0)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise SepconvError(f"server error {response.status_code}: {detail}")
    return response.json()


def _kernel_payload(config: Config) -> dict:
    if config.kernel is None:
        return {"name": "gaussian5"}
    return {"weights": list(config.kernel)}


def _remote(config: Config) -> int:
    with _open_client(config.server) as client:
        if config.command == "gen":
            rows, cols = config.sizes[0]
            body = _post(client, "/images/generate",
                         {"rows": rows, "cols": cols, "planes": config.planes, "seed": config.seed})
            Path(config.output_path).write_bytes(base64.b64decode(body["ppm_base64"]))
            print(f"wrote {config.output_path} ({rows}x{cols}, {config.planes} planes, seed {config.seed})")
            return 0
        if config.command == "convolve":
            if config.input_path is not None:
                raw = Path(config.input_path).read_bytes()
                image = {"ppm_base64": base64.b64encode(raw).decode("ascii")}
            else:
                rows, cols = config.sizes[0]
                image = {"synthetic": {"rows": rows, "cols": cols,
                                       "planes": config.planes, "seed": config.seed}}
            body = _post(client, "/convolve", {
                "image": image,
                "kernel": _kernel_payload(config),
                "algorithm": config.algorithm,
                "copy_back": config.copy_back,
                "vectorized": config.vectorized,
                "plan": {"mode": config.plan_mode, "workers": config.workers,
                         "cutoff": config.cutoff, "agglomerate": config.agglomerate},
                "return_image": config.output_path is not None,
            })
            if config.output_path is not None:
                Path(config.output_path).write_bytes(base64.b64decode(body["result_ppm_base64"]))
            stats = body["stats"]
            print(
                f"convolved {body['rows']}x{body['cols']}x{body['planes']} "
                f"[{config.algorithm}, {config.plan_mode}] "
                f"launches={stats['parallel_region_launches']} tasks={stats['tasks_spawned']} "
                f"wall={stats['wall_time_ns'] / 1e6:.3f} ms"
            )
            return 0
        if config.command == "ladder":
            payload = {
                "sizes": [list(s) for s in config.sizes],
                "planes": config.planes,
                "seed": config.seed,
                "reps": config.reps,
                "workers": config.workers,
                "cutoff": config.cutoff,
            }
            if config.stages is not None:
                payload["stages"] = list(config.stages)
            body = _post(client, "/bench/ladder", payload)
            if config.csv_out is not None:
                Path(config.csv_out).write_text(body["csv"], encoding="ascii")
                print(f"wrote {len(body['records'])} records to {config.csv_out}")
            else:
                sys.stdout.write(body["csv"])
            if body["failures"]:
                for failure in body["failures"]:
                    print(
                        f"correctness failure: {failure['label']} on "
                        f"{failure['rows']}x{failure['cols']}: {failure['detail']}",
                        file=sys.stderr,
                    )
                return 2
            return 0
        if config.command == "overhead":
            body = _post(client, "/bench/overhead", {
                "workers": config.workers, "cutoff": config.cutoff, "launches": config.reps,
            })
            print(
                f"per-launch overhead: {body['per_launch_ns'] / 1e6:.6f} ms "
                f"({body['launches']} launches of {body['cutoff']} empty tasks "
                f"on {body['workers']} workers)"
            )
            return 0
    raise SepconvError(f"unknown command {config.command!r}")


_COMMANDS = {
    "gen": _cmd_gen,
    "convolve": _cmd_convolve,
    "ladder": _cmd_ladder,
    "overhead": _cmd_overhead,
    "serve": _cmd_serve,
}


def main(config: Config) -> int:
    """Execute one parsed command; returns the process exit code."""
    if config.server is not None:
        return _remote(config)
    return _COMMANDS[config.command](config)


def entrypoint(argv: list[str] | None = None) -> int:
    try:
        code = main(parse_args(argv))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except SepconvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return code


if __name__ == "__main__":
    sys.exit(entrypoint())
