"""Command-line front end: a thin client of the HTTP service.

By default the CLI talks to the FastAPI app in-process (no server needed);
with --server URL it sends the same requests to a running instance.

    superext analyze FILE [--grid AxBxC] [--base x,y,z] [--tol T]
                          [--fit-dict FILE] [--machine-out FILE] [--server URL]
    superext check FILE --only NAME [--server URL]
    superext fixtures list
    superext fixtures show NAME
    superext serve [--host H] [--port P]

Exit codes: 0 extendable, 10 non-extendable, 1 input error, 2 a check the
theory guarantees came back nonzero (bug or invalid input system).
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx

EXIT_INPUT_ERROR = 1


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient
    from .service.app import app
    return TestClient(app, raise_server_exceptions=True)


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT_ERROR)


def _fit_dict(path: str) -> dict:
    """Candidate dictionary file: one 'label = expression' per line."""
    out = {}
    for ln, raw in enumerate(_read_file(path).splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            print(f"error: {path}:{ln}: expected 'label = expression'", file=sys.stderr)
            raise SystemExit(EXIT_INPUT_ERROR)
        label, txt = (s.strip() for s in line.split("=", 1))
        out[label] = txt
    return out


def cmd_analyze(args) -> int:
    payload = {"description": _read_file(args.file)}
    options = {}
    if args.grid:
        options["grid"] = args.grid
    if args.base:
        options["base"] = args.base
    if args.spacing:
        options["spacing"] = args.spacing
    if args.tol is not None:
        options["tol"] = args.tol
    if args.fit_dict:
        options["fit_candidates"] = _fit_dict(args.fit_dict)
    if options:
        payload["options"] = options
    with _client(args.server) as client:
        resp = client.post("/analyze", json=payload)
    if resp.status_code == 422:
        print(f"input error: {resp.json().get('detail')}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    resp.raise_for_status()
    body = resp.json()
    print(body["human"])
    if args.machine_out:
        with open(args.machine_out, "w", encoding="utf-8") as fh:
            json.dump(body["report"], fh, sort_keys=True, indent=1)
            fh.write("\n")
    return int(body["exit_code"])


def cmd_check(args) -> int:
    payload = {"description": _read_file(args.file), "only": args.only}
    with _client(args.server) as client:
        resp = client.post("/check", json=payload)
    if resp.status_code == 404:
        print(f"error: {resp.json().get('detail')}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    if resp.status_code == 422:
        print(f"input error: {resp.json().get('detail')}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    resp.raise_for_status()
    failed = False
    for o in resp.json()["outcomes"]:
        extra = f" [{o['detail']}]" if o.get("detail") else ""
        wit = f" witness: {o['witness']}" if o.get("witness") else ""
        print(f"{o['name']}: {o['status']}{extra}{wit}")
        if o["status"] in ("nonzero", "fail") and o.get("guaranteed"):
            failed = True
    return 2 if failed else 0


def cmd_fixtures(args) -> int:
    with _client(args.server) as client:
        if args.action == "list":
            resp = client.get("/fixtures")
            resp.raise_for_status()
            for name in resp.json()["fixtures"]:
                print(name)
            return 0
        resp = client.get(f"/fixtures/{args.name}")
        if resp.status_code == 404:
            print(f"error: {resp.json().get('detail')}", file=sys.stderr)
            return EXIT_INPUT_ERROR
        resp.raise_for_status()
        sys.stdout.write(resp.json()["description"])
        return 0


def cmd_serve(args) -> int:
    import uvicorn
    from .service.app import app
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 1), not residual failures (exit 2)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT_ERROR)


def build_parser() -> argparse.ArgumentParser:
    ap = _ArgumentParser(
        prog="superext",
        description="Decide extendability of an (n+1)-parameter superintegrable "
                    "system and reconstruct the extension when it exists.")
    sub = ap.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="run the full pipeline on a description file")
    pa.add_argument("file")
    pa.add_argument("--grid", help="grid spec AxBxC for the extension sampling")
    pa.add_argument("--base", help="comma-separated base point")
    pa.add_argument("--spacing", help="grid spacing (rational)")
    pa.add_argument("--tol", type=float, help="numeric tolerance override")
    pa.add_argument("--fit-dict", help="file of 'label = expression' fit candidates")
    pa.add_argument("--machine-out", help="write the machine-readable report here")
    pa.add_argument("--server", help="talk to a running service instead of in-process")
    pa.set_defaults(fn=cmd_analyze)

    pc = sub.add_parser("check", help="run a single named check")
    pc.add_argument("file")
    pc.add_argument("--only", required=True, help="check name from the registry")
    pc.add_argument("--server")
    pc.set_defaults(fn=cmd_check)

    pf = sub.add_parser("fixtures", help="list or show the shipped example systems")
    pf.add_argument("action", choices=["list", "show"])
    pf.add_argument("name", nargs="?")
    pf.add_argument("--server")
    pf.set_defaults(fn=cmd_fixtures)

    ps = sub.add_parser("serve", help="run the HTTP service")
    ps.add_argument("--host", default="127.0.0.1")
    ps.add_argument("--port", type=int, default=8000)
    ps.set_defaults(fn=cmd_serve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "fixtures" and args.action == "show" and not args.name:
        print("error: fixtures show needs a name", file=sys.stderr)
        return EXIT_INPUT_ERROR
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
