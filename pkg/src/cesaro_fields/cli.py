"""Command-line entry point.

The CLI is a thin client: every subcommand issues one request against the
HTTP service (in-process by default, or a remote base URL via --server)
and renders the response as CSV or JSON. Exit codes: 0 success/concordant,
2 discordant verdict, 3 inconclusive, 64 usage or domain error, 70 numeric
failure.
"""

import argparse
import asyncio
import json
import os
import sys
from datetime import datetime, timezone

import httpx

from ._util import canonical_json, format_float, write_csv

EX_OK = 0
EX_DISCORDANT = 2
EX_INCONCLUSIVE = 3
EX_USAGE = 64
EX_NUMERIC = 70

OUT_DIR_ENV = "CESARO_FIELDS_OUT_DIR"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags by default; the contract wants 64
    def error(self, message):
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


class _ServiceClient:
    def __init__(self, server: str = None):
        self.server = server

    def post(self, path: str, payload: dict) -> httpx.Response:
        if self.server:
            return httpx.post(
                self.server.rstrip("/") + path, json=payload, timeout=None
            )

        async def go():
            from .service import create_app

            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://service", timeout=None
            ) as client:
                return await client.post(path, json=payload)

        return asyncio.run(go())


def _fail_from_response(resp: httpx.Response) -> int:
    try:
        body = resp.json()
    except ValueError:
        body = {"error": {"type": "unknown", "message": resp.text}}
    err = body.get("error", body.get("detail", body))
    sys.stderr.write(f"error: {json.dumps(err, default=str)}\n")
    if resp.status_code == 500:
        return EX_NUMERIC
    return EX_USAGE


def _resolve_out(out):
    if out is None or out == "-":
        return None
    base = os.environ.get(OUT_DIR_ENV)
    if base and not os.path.dirname(out):
        return os.path.join(base, out)
    return out


def _emit_json(payload: dict, out) -> None:
    doc = dict(payload)
    doc["generated_at"] = datetime.now(timezone.utc).isoformat(
        timespec="seconds"
    )
    text = canonical_json(doc) + "\n"
    path = _resolve_out(out)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _emit_csv(header, rows, out) -> None:
    path = _resolve_out(out)
    if path is None:
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(
                ",".join(
                    format_float(v) if isinstance(v, float) else str(v)
                    for v in row
                )
                + "\n"
            )
    else:
        write_csv(path, header, rows)


def _merged(args: argparse.Namespace) -> dict:
    """Config-file values overridden by explicitly passed flags."""
    cfg = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise SystemExit(EX_USAGE)
    flags = {k: v for k, v in vars(args).items() if v is not None}
    merged = dict(cfg)
    merged.update(flags)
    return merged

def _require(merged: dict, key: str, parser: _Parser):
    if key not in merged:
        parser.error(f"missing required value: --{key.replace('_', '-')}")
    return merged[key]


def _profile_payload(merged: dict, parser: _Parser) -> dict:
    fam = _require(merged, "family", parser)
    prof = {"family": fam, "mu": merged.get("mu", 0.0)}
    for key in ("p", "q", "x0"):
        if merged.get(key) is not None:
            prof[key] = merged[key]
    return prof


def _parse_extent(text: str, parser: _Parser):
    try:
        m, n = text.lower().split("x")
        return [int(m), int(n)]
    except ValueError:
        parser.error(f"bad extent {text!r}, expected MxN")


def _parse_checkpoints(text: str, parser: _Parser):
    if text == "dyadic":
        return "dyadic"
    pts = []
    for tok in text.split(","):
        pts.append(_parse_extent(tok, parser))
    return pts


def _add_profile_flags(sp) -> None:
    sp.add_argument("--family",
                    choices=["rademacher", "uniform_sym", "gaussian",
                             "pareto_log"])
    sp.add_argument("--p", type=float)
    sp.add_argument("--q", type=float)
    sp.add_argument("--mu", type=float)
    sp.add_argument("--x0", type=float)


def _add_common(sp) -> None:
    sp.add_argument("--config", help="JSON config file; flags override it")
    sp.add_argument("--server", help="base URL of a running service")
    sp.add_argument("--out", help="output path (default stdout)")


def build_parser() -> _Parser:
    parser = _Parser(prog="cesaro-fields")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("weights", help="Cesaro weight table")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--table", action="store_true", default=None)
    _add_common(sp)

    sp = sub.add_parser("sample", help="sample a field block as CSV")
    _add_profile_flags(sp)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--extent")
    _add_common(sp)

    sp = sub.add_parser("mean1d", help="sequence means of every prefix")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--n", type=int)
    sp.add_argument("--input", help="CSV/plain file, one value per line")
    sp.add_argument("--method", choices=["auto", "naive", "fft"])
    _add_profile_flags(sp)
    sp.add_argument("--seed", type=int)
    _add_common(sp)

    sp = sub.add_parser("mean2d", help="field means at checkpoints")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    _add_profile_flags(sp)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--extent")
    sp.add_argument("--checkpoints", help='"dyadic" or m1xn1,m2xn2,...')
    sp.add_argument("--method", choices=["separable", "naive"])
    _add_common(sp)

    sp = sub.add_parser("verdict", help="theory vs diagnostic for one cell")
    sp.add_argument("--mode", choices=["prob", "complete", "as"])
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    _add_profile_flags(sp)
    sp.add_argument("--master-seed", type=int, dest="master_seed")
    sp.add_argument("--threads")
    sp.add_argument("--preset", choices=["quick", "full"])
    _add_common(sp)

    sp = sub.add_parser("complete-sum", help="analytic term-probability sums")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    _add_profile_flags(sp)
    sp.add_argument("--n-base", type=int, dest="n_base")
    _add_common(sp)

    sp = sub.add_parser("appendix-verify",
                        help="integral branch ratios + route concordance")
    sp.add_argument("--gamma-grid", dest="gamma_grid",
                    help="comma-separated gammas in (0,1)")
    sp.add_argument("--matrix", choices=["default"])
    sp.add_argument("--n-base", type=int, dest="n_base")
    _add_common(sp)

    sp = sub.add_parser("matrix", help="full theory-vs-experiment grid")
    sp.add_argument("--master-seed", type=int, dest="master_seed")
    sp.add_argument("--preset", choices=["quick", "full"])
    sp.add_argument("--threads")
    _add_common(sp)

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)

    return parser


def _threads_value(merged: dict):
    raw = merged.get("threads")
    if raw is None or raw == "max":
        return None
    try:
        return int(raw)
    except (TypeError, ValueError):
        return None


def _read_values(path: str):
    vals = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            tok = line.strip().split(",")[-1]
            if not tok:
                continue
            try:
                vals.append(float(tok))
            except ValueError:
                continue  # header line
    return vals


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EX_USAGE
    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return EX_OK

    merged = _merged(args)
    client = _ServiceClient(merged.get("server"))
    out = merged.get("out")

    if args.command == "weights":
        payload = {
            "alpha": _require(merged, "alpha", parser),
            "n": _require(merged, "n", parser),
        }
        resp = client.post("/v1/weights", payload)
        if resp.status_code != 200:
            return _fail_from_response(resp)
        body = resp.json()
        if merged.get("table"):
            rows = list(zip(body["k"], body["log_weight"], body["weight"]))
            _emit_csv(["k", "log_weight", "weight"], rows, out)
        else:
            sys.stdout.write(format_float(body["weight"][-1]) + "\n")
        return EX_OK

    if args.command == "sample":
        payload = {
            "profile": _profile_payload(merged, parser),
            "seed": merged.get("seed", 0),
            "extent": _parse_extent(_require(merged, "extent", parser),
                                    parser),
        }
        resp = client.post("/v1/sample", payload)
        if resp.status_code != 200:
            return _fail_from_response(resp)
        body = resp.json()
        rows = [
            (k, l, float(v))
            for k, row in enumerate(body["values"])
            for l, v in enumerate(row)
        ]
        _emit_csv(["k", "l", "value"], rows, out)
        return EX_OK

    if args.command == "mean1d":
        payload = {
            "alpha": _require(merged, "alpha", parser),
            "method": merged.get("method", "auto"),
        }
        if merged.get("input"):
            payload["values"] = _read_values(merged["input"])
        else:
            payload["profile"] = _profile_payload(merged, parser)
            payload["seed"] = merged.get("seed", 0)
            payload["n"] = _require(merged, "n", parser)
        resp = client.post("/v1/mean1d", payload)
        if resp.status_code != 200:
            return _fail_from_response(resp)
        body = resp.json()
        rows = list(zip(body["n"], map(float, body["mean"])))
        _emit_csv(["n", "mean"], rows, out)
        return EX_OK

    if args.command == "mean2d":
        payload = {
            "alpha": _require(merged, "alpha", parser),
            "beta": _require(merged, "beta", parser),
            "profile": _profile_payload(merged, parser),
            "seed": merged.get("seed", 0),
            "extent": _parse_extent(_require(merged, "extent", parser),
                                    parser),
            "checkpoints": _parse_checkpoints(
                merged.get("checkpoints", "dyadic"), parser
            ),
            "method": merged.get("method", "separable"),
        }
        resp = client.post("/v1/mean2d", payload)
        if resp.status_code != 200:
            return _fail_from_response(resp)
        rows = [
            (r["m"], r["n"], float(r["mean"]), float(r["abs_dev_from_mu"]))
            for r in resp.json()["rows"]
        ]
        _emit_csv(["m", "n", "mean", "abs_dev_from_mu"], rows, out)
        return EX_OK

    if args.command == "verdict":
        payload = {
            "mode": _require(merged, "mode", parser),
            "alpha": _require(merged, "alpha", parser),
            "beta": _require(merged, "beta", parser),
            "profile": _profile_payload(merged, parser),
            "master_seed": merged.get("master_seed", 0),
            "threads": _threads_value(merged),
            "preset": merged.get("preset", "full"),
        }
        resp = client.post("/v1/verdict", payload)
        if resp.status_code != 200:
            return _fail_from_response(resp)
        body = resp.json()
        _emit_json(body, out)
        if body["concordant"] is True:
            return EX_OK
        if body["concordant"] is False:
            return EX_DISCORDANT
        return EX_INCONCLUSIVE

    if args.command == "complete-sum":
        payload = {
            "alpha": _require(merged, "alpha", parser),
            "profile": _profile_payload(merged, parser),
            "n_base": merged.get("n_base", 128),
        }
        if merged.get("beta") is not None:
            payload["beta"] = merged["beta"]
        resp = client.post("/v1/complete-sum", payload)
        if resp.status_code != 200:
            return _fail_from_response(resp)
        body = resp.json()
        _emit_json(body, out)
        if body["classification"] == "inconclusive":
            return EX_INCONCLUSIVE
        return EX_OK

    if args.command == "appendix-verify":
        payload = {"n_base": merged.get("n_base", 128)}
        gg = merged.get("gamma_grid")
        if gg:
            if isinstance(gg, str):
                gg = [float(t) for t in gg.split(",") if t]
            payload["gamma_grid"] = gg
        resp = client.post("/v1/appendix-verify", payload)
        if resp.status_code != 200:
            return _fail_from_response(resp)
        body = resp.json()
        _emit_json(body, out)
        if body["ok"]:
            return EX_OK
        eq = body["equivalence"]
        if eq["discordant"] or not body["branch_ratios"]["all_stable"]:
            return EX_DISCORDANT
        return EX_INCONCLUSIVE

    if args.command == "matrix":
        payload = {
            "master_seed": merged.get("master_seed", 0),
            "preset": merged.get("preset", "quick"),
            "threads": _threads_value(merged),
        }
        resp = client.post("/v1/matrix", payload)
        if resp.status_code != 200:
            return _fail_from_response(resp)
        body = resp.json()
        _emit_json(body, out)
        if body["discordant"]:
            return EX_DISCORDANT
        if body["inconclusive"]:
            return EX_INCONCLUSIVE
        return EX_OK

    parser.error(f"unknown command {args.command!r}")
    return EX_USAGE


if __name__ == "__main__":
    sys.exit(main())
