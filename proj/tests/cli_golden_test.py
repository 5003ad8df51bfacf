#!/usr/bin/env python3
"""End-to-end checks of the ecw command line tool.

Usage: cli_golden_test.py <ecw-binary> <tests-dir>

Exercises every exit code, compares eval output byte-for-byte against the
golden files, and checks that witness reports are deterministic once the
timestamp is stripped.
"""
import json
import re
import subprocess
import sys
import tempfile
from pathlib import Path

BINARY = Path(sys.argv[1])
TESTS = Path(sys.argv[2])
DATA = TESTS / "data"
GOLDEN = TESTS / "golden"

failures = []


def run(*args, timeout=240):
    return subprocess.run([str(BINARY), *args], capture_output=True, text=True, timeout=timeout)


def check(name, cond, detail=""):
    status = "ok" if cond else "FAIL"
    print(f"[{status}] {name}" + (f": {detail}" if detail and not cond else ""))
    if not cond:
        failures.append(name)


def strip_timestamp(text):
    return re.sub(r'"timestamp": "[^"]*"', '"timestamp": ""', text)


def main():
    tmp = Path(tempfile.mkdtemp(prefix="ecw_cli_"))

    # --- eval: byte-golden output, derivative mode, error paths ---
    r = run("eval", "--z", "0", "1")
    check("eval exit 0", r.returncode == 0, f"rc={r.returncode} err={r.stderr}")
    golden = (GOLDEN / "eval_i.txt").read_text()
    check("eval j(i) golden bytes", r.stdout == golden, f"got {r.stdout!r} want {golden!r}")

    r = run("eval", "--z", "0.3123", "1.0421", "--derivs")
    check("eval derivs exit 0", r.returncode == 0, f"rc={r.returncode} err={r.stderr}")
    golden = (GOLDEN / "eval_derivs.txt").read_text()
    check("eval derivs golden bytes", r.stdout == golden, f"got {r.stdout!r} want {golden!r}")
    lines = r.stdout.splitlines()
    check("eval derivs has three lines", len(lines) == 3 and
          [ln.split()[0] for ln in lines] == ["j", "jprime", "jsecond"])

    r = run("eval", "--z", "0", "-1")
    check("eval below axis exits 2", r.returncode == 2, f"rc={r.returncode}")
    r = run("eval", "--z", "0", "1", "--prec", "1e-150")
    check("eval unreachable precision exits 3", r.returncode == 3, f"rc={r.returncode}")

    # --- check: verdict reports, determinism ---
    out1 = tmp / "check1.json"
    out2 = tmp / "check2.json"
    r = run("check", "--in", str(DATA / "shift.json"), "--out", str(out1))
    check("check shift exits 0", r.returncode == 0, f"rc={r.returncode} err={r.stderr}")
    rep = json.loads(out1.read_text())
    verd = rep["witness"]["verdicts"]
    check("check shift domain pass", verd["free_domain"]["kind"] == "pass")
    check("check shift codomain probable", verd["free_codomain"]["kind"] == "probable")
    r = run("check", "--in", str(DATA / "shift.json"), "--out", str(out2))
    check("check is deterministic",
          strip_timestamp(out1.read_text()) == strip_timestamp(out2.read_text()))

    r = run("check", "--in", str(DATA / "torus_cm.json"))
    check("check CM line exits 1", r.returncode == 1, f"rc={r.returncode} err={r.stderr}")
    check("check CM names density", "density" in (r.stdout + r.stderr).lower(),
          f"out={r.stdout!r} err={r.stderr!r}")

    # --- witness: success modes, determinism, seed override, scans ---
    wout1 = tmp / "w1.json"
    wout2 = tmp / "w2.json"
    r = run("witness", "--in", str(DATA / "shift.json"), "--out", str(wout1))
    check("witness shift exits 0", r.returncode == 0, f"rc={r.returncode} err={r.stderr}")
    rep = json.loads(wout1.read_text())
    check("witness shift mode", rep["witness"]["mode"] == "j")
    check("witness shift residual", max(rep["witness"]["residuals"]) <= 1e-9,
          str(rep["witness"]["residuals"]))
    r = run("witness", "--in", str(DATA / "shift.json"), "--out", str(wout2))
    check("witness is deterministic",
          strip_timestamp(wout1.read_text()) == strip_timestamp(wout2.read_text()))

    r = run("witness", "--in", str(DATA / "shift.json"), "--seed", "123",
            "--out", str(tmp / "seeded.json"))
    check("witness seed override exits 0", r.returncode == 0, f"rc={r.returncode}")
    rep = json.loads((tmp / "seeded.json").read_text())
    check("witness seed embedded", rep["problem"]["config"]["seed"] == 123,
          str(rep["problem"]["config"]))

    scan_out = tmp / "scanned.json"
    r = run("witness", "--in", str(DATA / "shift.json"), "--out", str(scan_out), "--scan")
    check("witness scan exits 0", r.returncode == 0, f"rc={r.returncode} err={r.stderr}")
    heights = tmp / "scanned.heights.csv"
    newton = tmp / "scanned.newton.csv"
    check("scan writes heights csv", heights.exists() and
          heights.read_text().startswith("height,best_distance\n"))
    check("scan writes newton csv", newton.exists() and
          newton.read_text().startswith("step,abs_residual\n"))
    r = run("witness", "--in", str(DATA / "shift.json"), "--scan")
    check("scan without --out exits 2", r.returncode == 2, f"rc={r.returncode}")

    for name, mode in [("torus_free.json", "torus"), ("blur.json", "jprime"),
                       ("constant.json", "j")]:
        out = tmp / f"w_{name}"
        r = run("witness", "--in", str(DATA / name), "--out", str(out))
        check(f"witness {name} exits 0", r.returncode == 0,
              f"rc={r.returncode} err={r.stderr}")
        rep = json.loads(out.read_text())
        check(f"witness {name} mode", rep["witness"]["mode"] == mode)

    # --- failure exit codes ---
    r = run("witness", "--in", str(DATA / "torus_cm.json"))
    check("witness CM line exits 1", r.returncode == 1, f"rc={r.returncode}")
    r = run("witness", "--in", str(DATA / "pinned_contradiction.json"))
    check("witness pinned contradiction exits 1 (gate)", r.returncode == 1,
          f"rc={r.returncode}")
    exh_out = tmp / "exhausted.json"
    r = run("witness", "--in", str(DATA / "pinned_contradiction.json"), "--force",
            "--out", str(exh_out))
    check("witness --force on contradiction exits 4", r.returncode == 4,
          f"rc={r.returncode} err={r.stderr}")
    check("exhausted report still written", exh_out.exists())
    if exh_out.exists():
        rep = json.loads(exh_out.read_text())
        check("exhausted report carries budget", "budget" in rep["witness"])
    r = run("witness", "--in", str(DATA / "bad.json"))
    check("witness malformed input exits 2", r.returncode == 2, f"rc={r.returncode}")
    r = run("check", "--in", str(tmp / "does_not_exist.json"))
    check("check missing file exits 2", r.returncode == 2, f"rc={r.returncode}")

    print(f"{'FAILED' if failures else 'passed'}: "
          f"{len(failures)} failures" if failures else "all cli checks passed")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
