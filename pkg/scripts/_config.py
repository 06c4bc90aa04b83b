"""Turn a dataclass of experiment settings into command-line flags."""

import argparse
import dataclasses


def parse_config(cls, argv=None, description=None):
    parser = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        flag = "--" + f.name.replace("_", "-")
        if f.type in (bool, "bool"):
            parser.add_argument(flag, action="store_true", default=f.default)
        else:
            kind = {"int": int, "str": str}.get(f.type, f.type)
            parser.add_argument(flag, type=kind, default=f.default)
    return cls(**vars(parser.parse_args(argv)))
