"""Run the sidecar: ``python -m lexsimp_sidecar [--port N] [--mode stub|real]``."""

from __future__ import annotations

import argparse
import json
import os

from .server import ModelRegistry, create_server


def main() -> None:
    parser = argparse.ArgumentParser(prog="lexsimp-sidecar")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8765)
    parser.add_argument("--mode", choices=["stub", "real"],
                        default=os.environ.get("LEXSIMP_SIDECAR_MODE", "stub"))
    parser.add_argument("--fill-mask-table",
                        help="JSON file: query text -> ordered candidates "
                             "(stub mode)")
    parser.add_argument("--generate-table",
                        help="JSON file: source -> ordered candidates "
                             "(stub mode)")
    args = parser.parse_args()

    def load_table(path):
        if not path:
            return None
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)

    registry = ModelRegistry(mode=args.mode,
                             fill_mask_table=load_table(args.fill_mask_table),
                             generate_table=load_table(args.generate_table))
    server = create_server(args.host, args.port, registry)
    print(f"sidecar listening on http://{args.host}:{server.server_port} "
          f"(mode={args.mode})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


if __name__ == "__main__":
    main()
