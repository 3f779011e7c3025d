"""Command-line interface.

Each subcommand builds a request model, obtains a response either by calling
the in-process handler or by POSTing to a running service (``--server``), and
prints the response as canonically sorted JSON (or, for survey histograms,
CSV).  Exit codes: 0 success, 2 theorem-violation verdict, 1 any error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .errors import LabError
from .service import models
from .service.app import (
    handle_classify,
    handle_circles,
    handle_newstead,
    handle_orbit,
    handle_subbundle_types,
    handle_survey,
    handle_torsion,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

_ENDPOINTS = {
    "classify": ("/classify", handle_classify, models.ClassifyResponse),
    "circles": ("/circles", handle_circles, models.CirclesResponse),
    "torsion": ("/torsion", handle_torsion, models.TorsionResponse),
    "orbit": ("/orbit", handle_orbit, models.OrbitResponse),
    "survey": ("/survey", handle_survey, models.SurveyResponse),
    "subbundle-types": ("/subbundle-types", handle_subbundle_types, models.SubbundleTypesResponse),
    "newstead": ("/newstead", handle_newstead, models.NewsteadResponse),
}


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit 1 (2 means theorem violation)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="real-subbundle-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, curve_required=True):
        if curve_required:
            p.add_argument("--curve", required=True, help="path to a curve spec JSON file")
        else:
            p.add_argument("--curve", default=None, help="path to a curve spec JSON file")
        p.add_argument("--tol", type=float, default=None, help="override the curve tolerance")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--server", default=None, metavar="URL",
                       help="send the request to a running service instead of computing locally")

    for name in ("classify", "circles", "torsion"):
        common(sub.add_parser(name))

    p = sub.add_parser("orbit")
    common(p)
    p.add_argument("--divisor", required=True, help="path to a divisor literal JSON file")

    p = sub.add_parser("survey")
    common(p)
    p.add_argument("--lambda", dest="lam", required=True, metavar="BITS",
                   help="determinant odd-circle bits, e.g. 100")
    p.add_argument("--recipe", default=None, help="run one recipe instead of the battery")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--keep-trials", action="store_true",
                   help="include the per-trial log in the report")

    p = sub.add_parser("subbundle-types")
    common(p, curve_required=False)
    p.add_argument("--lambda", dest="lam", required=True, metavar="BITS",
                   help="determinant odd-circle bits, e.g. 110")
    p.add_argument("--n", type=int, default=None, help="number of fixed circles")

    p = sub.add_parser("newstead")
    common(p)
    p.add_argument("--samples", type=int, default=60, help="real points to collect per form")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=2000, help="plane sections tried per form")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _load_json(path: str):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _curve_spec(args) -> models.CurveSpec | None:
    if args.curve is None:
        return None
    data = _load_json(args.curve)
    if not isinstance(data, dict):
        raise ValueError("curve spec must be a JSON object")
    if args.tol is not None:
        data["tol"] = args.tol
    return models.CurveSpec(**data)


def _build_request(args):
    if args.command in ("classify", "circles", "torsion"):
        return models.CurveRequest(curve=_curve_spec(args))
    if args.command == "orbit":
        literal = _load_json(args.divisor)
        return models.OrbitRequest(
            curve=_curve_spec(args), divisor=models.DivisorModel(**literal)
        )
    if args.command == "survey":
        return models.SurveyRequest(
            curve=_curve_spec(args),
            determinant=args.lam,
            recipe=args.recipe,
            trials=args.trials,
            seed=args.seed,
            keep_trials=args.keep_trials,
        )
    if args.command == "subbundle-types":
        return models.SubbundleTypesRequest(
            signature=args.lam, n=args.n, curve=_curve_spec(args)
        )
    if args.command == "newstead":
        return models.NewsteadRequest(
            curve=_curve_spec(args),
            samples=args.samples,
            seed=args.seed,
            budget=args.budget,
        )
    raise ValueError(f"unknown command {args.command!r}")


def _execute(args, request):
    path, handler, response_model = _ENDPOINTS[args.command]
    if args.server is None:
        return handler(request)
    import httpx

    url = args.server.rstrip("/") + path
    reply = httpx.post(url, json=request.model_dump(by_alias=True), timeout=600.0)
    if reply.status_code != 200:
        raise LabError(f"server returned {reply.status_code}: {reply.text}")
    return response_model(**reply.json())


def _survey_csv(response: models.SurveyResponse) -> str:
    buf = io.StringIO()
    buf.write(f"# version={response.meta.version}\n")
    buf.write(f"# curve_hash={response.meta.curve_hash}\n")
    buf.write(f"# seed={response.meta.seed}\n")
    buf.write(f"# lambda={response.determinant}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["recipe", "count", "frequency", "nondegenerate", "discards"])
    for cell in response.cells:
        for count in sorted(cell.histogram, key=int):
            writer.writerow(
                [cell.recipe, count, cell.histogram[count], cell.nondegenerate,
                 cell.degenerate_discards]
            )
    return buf.getvalue()


def _render(args, response) -> str:
    if args.format == "csv":
        if args.command != "survey":
            raise ValueError("csv output is only available for survey histograms")
        return _survey_csv(response)
    payload = response.model_dump(by_alias=True)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _emit(args, text: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)


def dispatch(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK
    try:
        request = _build_request(args)
        response = _execute(args, request)
        _emit(args, _render(args, response))
    except (LabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.command == "survey" and response.verdict.verdict == "violation":
        print("theorem-violation verdict; see the report for offenders", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def main(argv=None) -> int:
    return dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
