"""Run every JSON-emitting subcommand and validate the output against schemas/."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource


def main():
    cli, data, schemas = (pathlib.Path(a) for a in sys.argv[1:4])
    resources = []
    for path in schemas.glob("*.schema.json"):
        doc = json.loads(path.read_text())
        resources.append((doc["$id"], Resource.from_contents(doc)))
    registry = Registry().with_resources(resources)

    def validator(name):
        schema = json.loads((schemas / f"{name}.schema.json").read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        return jsonschema.Draft202012Validator(schema, registry=registry)

    failures = 0

    def check(name, doc, label):
        nonlocal failures
        errors = sorted(validator(name).iter_errors(doc), key=lambda e: list(e.path))
        status = "ok" if not errors else "INVALID"
        print(f"{status:8} {name:18} {label}")
        for e in errors[:5]:
            print(f"         {list(e.path)}: {e.message}")
        failures += bool(errors)

    def run(args, expect=0, stream="stdout"):
        p = subprocess.run([str(cli), *args], capture_output=True, text=True)
        if p.returncode != expect:
            raise SystemExit(f"{args}: exit {p.returncode}, expected {expect}\n{p.stderr}")
        return json.loads(getattr(p, stream))

    with tempfile.TemporaryDirectory() as tmp:
        cc = f"{tmp}/callcenter.csv"
        subprocess.run([str(cli), "simulate", "callcenter", "--config", str(data / "callcenter.json"), "--out", cc],
                       check=True)
        hand = str(data / "hand_ols.csv")
        model = ["--data", cc, "--response", "abandonment", "--covariates", "calls,absentees,location"]
        hand_model = ["--data", hand, "--response", "y", "--covariates", "x"]

        check("fit", run(["fit", *model]), "fit call-center")
        check("fit", run(["fit", "--data", str(data / "null_ols.csv"), "--response", "y"]), "fit null model")
        for at in ["medians", "minima", "maxima", "means", '{"x":1}']:
            check("leak", run(["leak", *hand_model, "--support", "[0,inf)", "--at", at]), f"leak hand --at {at}")
        check("leak", run(["leak", *model, "--support", "[0,inf)"]), "leak call-center medians")
        check("leak", run(["leak", *hand_model, "--support", "lattice(0,10,1)", "--at", '{"x":1}']),
              "leak lattice support")
        check("leak", run(["leak", *hand_model, "--support", "(0,1]", "--at", '{"x":1}']), "leak half-open support")
        check("falsify", run(["falsify", *hand_model]), "falsify point")
        check("falsify", run(["falsify", *hand_model, "--mode", "interval", "--resolution", "0.5"]),
              "falsify interval")
        check("calibrate", run(["calibrate", *model, "--holdout", "0.3"]), "calibrate call-center")
        check("report", run(["report", *model, "--support", "[0,inf)", "--out-curves", f"{tmp}/c.csv"]),
              "report call-center")
        check("report", run(["report", "--data", str(data / "null_ols.csv"), "--response", "y", "--support", "[0,inf)"]),
              "report null model")
        check("error", run(["fit", "--json-errors"], expect=1, stream="stderr"), "usage error")
        check("error", run(["fit", "--data", f"{tmp}/none.csv", "--response", "y", "--json-errors"], expect=2,
                           stream="stderr"), "data error")

    for cfg in ["truncated.json", "truncated_control.json"]:
        check("sim_config", json.loads((data / cfg).read_text()), f"data/{cfg}")
    check("callcenter_config", json.loads((data / "callcenter.json").read_text()), "data/callcenter.json")

    print(f"{failures} invalid document(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
