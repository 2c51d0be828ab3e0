#!/usr/bin/env python3
"""Validate Vega-Lite documents against a JSON schema file.

usage: validate_vegalite.py SCHEMA PATH...

Each PATH is a .json file or a directory searched recursively for *.vl.json.
Prints one line per invalid document and a final summary; exits 1 if any
document fails, 2 on usage errors.
"""

import json
import pathlib
import sys

import jsonschema


def documents(paths):
    for p in map(pathlib.Path, paths):
        if p.is_dir():
            yield from sorted(p.rglob("*.vl.json"))
        else:
            yield p


def main(argv):
    if len(argv) < 3:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    schema = json.loads(pathlib.Path(argv[1]).read_text())
    validator = jsonschema.Draft7Validator(schema)
    checked = failed = 0
    for path in documents(argv[2:]):
        checked += 1
        doc = json.loads(path.read_text())
        error = jsonschema.exceptions.best_match(validator.iter_errors(doc))
        if error is not None:
            failed += 1
            where = "/".join(str(p) for p in error.absolute_path) or "<root>"
            print(f"INVALID {path}: at {where}: {error.message[:300]}")
    print(f"checked {checked} failed {failed}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
