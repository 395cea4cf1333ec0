"""End-to-end checks of the covext binary: exit codes, file formats and
schema conformance of every document it writes."""

import argparse
import csv
import json
import math
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

FAILURES = []


def check(cond, message):
    if not cond:
        FAILURES.append(message)
        print("FAIL:", message)


def run(binary, *args):
    proc = subprocess.run([binary, *map(str, args)], capture_output=True, text=True)
    return proc.returncode, proc.stdout, proc.stderr


def load_schemas(directory):
    resources = []
    schemas = {}
    for path in Path(directory).glob("*.schema.json"):
        doc = json.loads(path.read_text())
        resources.append((doc["$id"], Resource.from_contents(doc)))
        schemas[path.name] = doc
    return schemas, Registry().with_resources(resources)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--binary", required=True)
    parser.add_argument("--fixtures", required=True)
    parser.add_argument("--schemas", required=True)
    args = parser.parse_args()
    exe = args.binary
    fx = Path(args.fixtures)
    schemas, registry = load_schemas(args.schemas)

    def validate(doc, schema_name, what):
        validator = jsonschema.Draft202012Validator(schemas[schema_name], registry=registry)
        errors = list(validator.iter_errors(doc))
        check(not errors, f"{what} violates {schema_name}: {errors[:1]}")

    for fixture in sorted(fx.glob("*.json")):
        validate(json.loads(fixture.read_text()), "problem.schema.json", fixture.name)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)

        # extend
        for name, code in [("n1_covariance", 0), ("n1_sigma_half", 0), ("white_noise", 0),
                           ("geometric", 0), ("degree_gap", 0), ("singular", 2)]:
            out = tmp / f"{name}.sol.json"
            rc, _, err = run(exe, "extend", fx / f"{name}.json", "--out", out)
            check(rc == code, f"extend {name}: exit {rc}, expected {code}: {err}")
            if code == 0:
                sol = json.loads(out.read_text())
                validate(sol, "solution.schema.json", f"extend {name}")
                check(sol["all_checks_pass"], f"extend {name}: checks fail")
        sol = json.loads((tmp / "n1_covariance.sol.json").read_text())
        check(abs(sol["a"][0] + 0.5) < 1e-10, "n=1 fixture a")
        check(abs(sol["rho"] - 0.8660254) < 1e-7, "n=1 fixture rho")
        sol = json.loads((tmp / "white_noise.sol.json").read_text())
        check(sol["a"] == sol["sigma"] and sol["rho"] == 1.0, "white noise gives a = sigma")

        # standard output when --out is absent, and flag handling
        rc, text, _ = run(exe, "extend", fx / "n1_covariance.json", "--method", "newton",
                          "--tol", "1e-13", "--samples", "512")
        check(rc == 0, "extend to stdout")
        doc = json.loads(text)
        check(doc["provenance"]["method"] == "newton", "--method recorded")
        check(doc["provenance"]["tolerances"]["samples"] == 512, "--samples recorded")
        rc, _, _ = run(exe, "extend", fx / "n1_covariance.json", "--method", "simplex")
        check(rc == 2, "bad --method is exit 2")
        rc, _, _ = run(exe, "frobnicate")
        check(rc == 2, "unknown subcommand is exit 2")

        # nevpick
        out = tmp / "np.sol.json"
        rc, _, err = run(exe, "nevpick", fx / "np_n1.json", "--out", out)
        check(rc == 0, f"nevpick worked case: {err}")
        sol = json.loads(out.read_text())
        validate(sol, "solution.schema.json", "nevpick")
        check(abs(sol["a"][0] + 0.5) < 1e-10, "nevpick a = -0.5")
        rc, _, _ = run(exe, "nevpick", fx / "np_n1.json", "--paper-factor", "--out", tmp / "p.json")
        check(rc == 4, "--paper-factor exits 4")
        paper = json.loads((tmp / "p.json").read_text())
        validate(paper, "solution.schema.json", "nevpick --paper-factor")
        check(abs(paper["a"][0] + 0.4183006535947719) < 1e-12, "--paper-factor output locked")
        rc, _, _ = run(exe, "nevpick", fx / "np_constant.json", "--out", tmp / "c.json")
        const = json.loads((tmp / "c.json").read_text())
        check(rc == 0 and max(map(abs, const["a"] + const["b"])) == 0.0, "f = 1/2")
        rc, _, _ = run(exe, "nevpick", fx / "np_ill_conditioned.json")
        check(rc == 5, "ill-conditioned I + T exits 5")

        # verify
        sol_path = tmp / "n1_sigma_half.sol.json"
        rc, text, _ = run(exe, "verify", sol_path, fx / "n1_sigma_half.json")
        check(rc == 0, "verify fresh solution")
        report = json.loads(text)
        validate(report, "verify-report.schema.json", "verify report")
        tampered = json.loads(sol_path.read_text())
        tampered["P"][0] += 1e-3
        (tmp / "t.json").write_text(json.dumps(tampered))
        rc, text, err = run(exe, "verify", tmp / "t.json", fx / "n1_sigma_half.json")
        failed = {c["name"] for c in json.loads(text)["checks"] if not c["pass"]}
        check(rc == 4 and "cee_residual" in failed, f"tampered P: {failed}")
        check("cee_residual" in err, "per-check breakdown on stderr")
        rc, text, _ = run(exe, "verify", sol_path, fx / "n1_other.json")
        failed = {c["name"] for c in json.loads(text)["checks"] if not c["pass"]}
        check(rc == 4 and "covariance_match" in failed, f"wrong problem: {failed}")

        # spectrum
        rc, text, _ = run(exe, "spectrum", tmp / "n1_covariance.sol.json", "--samples", "9")
        check(rc == 0 and "\r" not in text and text.endswith("\n"), "spectrum LF output")
        rows = list(csv.reader(text.splitlines()))
        check(rows[0] == ["theta", "phi", "re_f"], "spectrum header")
        body = [[float(x) for x in r] for r in rows[1:]]
        check(len(body) == 9, "row count = samples")
        check(body[0][0] == 0.0 and body[-1][0] == math.pi, "theta endpoints")
        check(abs(body[-1][1] - 1.0 / 3.0) < 1e-12, "phi(pi) = 1/3")
        check(all(abs(r[1] - 2 * r[2]) < 1e-10 for r in body), "phi = 2 Re f")
        rc, text, _ = run(exe, "spectrum", tmp / "white_noise.sol.json", "--samples", "5")
        check(all(abs(float(r[1]) - 1.0) < 1e-14 for r in list(csv.reader(text.splitlines()))[1:]),
              "white noise spectrum is 1")

        # estimate
        rc, text, _ = run(exe, "estimate", fx / "series_alternating.csv", "--lags", "2")
        problem = json.loads(text)
        validate(problem, "problem.schema.json", "estimate output")
        raw = problem["diagnostics"]["raw_c"]
        check(rc == 0 and max(abs(a - b) for a, b in zip(raw, [1, -2 / 3, 1 / 3])) < 1e-15,
              "estimate raw covariances")
        rc, _, _ = run(exe, "estimate", fx / "series_alternating.csv", "--lags", "5")
        check(rc == 2, "too many lags is exit 2")
        (tmp / "bad.csv").write_text("y\n1\nabc\n")
        rc, _, _ = run(exe, "estimate", tmp / "bad.csv", "--lags", "1")
        check(rc == 2, "non-numeric CSV is exit 2")
        (tmp / "empty.csv").write_text("")
        rc, _, _ = run(exe, "estimate", tmp / "empty.csv", "--lags", "0")
        check(rc == 2, "empty CSV is exit 2")
        rc, text, err = run(exe, "estimate", fx / "series_constant.csv", "--lags", "2", "--unbiased")
        check(rc == 0 and "warning" in err, "constant series warns")
        check(abs(json.loads(text)["diagnostics"]["toeplitz_min_eig"]) < 1e-12, "constant series lambda_min")
        rc, _, _ = run(exe, "estimate", fx / "series_alternating.csv", "--lags", "2", "--out", tmp / "e.json")
        rc, _, _ = run(exe, "extend", tmp / "e.json", "--out", tmp / "e.sol.json")
        check(rc == 0, "estimate output feeds extend")

        # posdeg
        expected = {"white_noise": (0, 0), "geometric": (1, 1), "degree_gap": (1, 2)}
        for name, pair in expected.items():
            rc, text, _ = run(exe, "posdeg", fx / f"{name}.json", "--grid", "11", "--seed", "3")
            report = json.loads(text)
            validate(report, "posdeg-report.schema.json", f"posdeg {name}")
            got = (report["algebraic_degree"], report["positive_degree"])
            check(rc == 0 and got == pair, f"posdeg {name}: {got}, expected {pair}")
        a = run(exe, "posdeg", fx / "white_noise.json", "--seed", "5", "--draws", "50")[1]
        b = run(exe, "posdeg", fx / "white_noise.json", "--seed", "5", "--draws", "50")[1]
        check(a == b, "posdeg deterministic for a fixed seed")

    print(f"{len(FAILURES)} failure(s)")
    return 1 if FAILURES else 0


if __name__ == "__main__":
    sys.exit(main())
