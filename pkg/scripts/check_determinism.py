#!/usr/bin/env python3
"""Run every catalog fixture through the CLI with two thread counts and compare bytes."""
import argparse
import os
import subprocess
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from dotenv import load_dotenv

ROOT = Path(__file__).resolve().parent.parent
CLI = ROOT / "run_donaldson.py"

sys.path.insert(0, str(ROOT))
load_dotenv()

from algebra.poly import LAMBDA  # noqa: E402
from commands.catalog import FixtureCatalog  # noqa: E402
from core.config_loader import ConfigLoader  # noqa: E402
from fitting.structfit import required_cutoff  # noqa: E402
from invariants.series import DonaldsonSeries, basic_classes  # noqa: E402

PER_FIXTURE = [
    ["expand", "--cutoff", "6", "--lambda-cutoff", "3"],
    ["basic-classes"],
    ["order"],
    ["symmetry-check", "--cutoff", "6"],
    ["km-form"],
    ["d0"],
    ["blowup", "--variant", "cosh"],
    ["blowup", "--variant", "sinh"],
    ["sum-s1s3", "--cycle", "gamma"],
]
STANDALONE = [
    ["catalog"],
    ["annihilators", "--genus", "3", "--mult", "2", "--dsigma", "1"],
]

# (command, stdin produced by another command or None)
Job = Tuple[List[str], Optional[List[str]]]


def coords(values) -> str:
    return ",".join(str(v) for v in values)


def fixture_jobs(name: str, S: DonaldsonSeries) -> List[Job]:
    """Commands whose flags depend on the fixture's rank and classes."""
    unit = [1] + [0] * (S.rank - 1)
    classes = basic_classes(S)
    K = classes[0][0].to_list() if classes else [0] * S.rank
    jobs: List[Job] = [([*cmd, "--fixture", name], None) for cmd in PER_FIXTURE]
    jobs += [
        (["recolor", f"--w={coords(unit)}", "--fixture", name], None),
        (["twist", f"--alpha={coords(unit)}", "--fixture", name], None),
        (["isolate", f"--class={coords(K)}", "--fixture", name], None),
        (["blowdown"], ["blowup", "--variant", "sinh", "--fixture", name]),
    ]

    bounds = [max((abs(t.K[j]) for t in S.terms), default=0) for j in range(S.rank)]
    degree = max((t.poly.total_degree(S.variables[:-1]) for t in S.terms), default=0)
    lambda_degree = max((t.poly.degree(LAMBDA) for t in S.terms), default=0)
    total, lam = required_cutoff(bounds, degree, lambda_degree)
    fit = [
        "fit",
        f"--bound={coords(bounds)}",
        "--max-degree",
        str(degree),
        "--max-lambda-degree",
        str(lambda_degree),
    ]
    jobs.append((fit, ["expand", "--cutoff", str(total), "--lambda-cutoff", str(lam), "--fixture", name]))
    return jobs


def run(args: List[str], threads: int, stdin: Optional[bytes] = None) -> Tuple[int, bytes]:
    env = dict(os.environ, DONALDSON_THREADS=str(threads))
    proc = subprocess.run(
        [sys.executable, str(CLI), *args], input=stdin, capture_output=True, env=env, cwd=ROOT
    )
    return proc.returncode, proc.stdout


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--threads", type=int, nargs=2, default=[1, 4], metavar=("A", "B"))
    args = parser.parse_args()

    config_loader = ConfigLoader()
    catalog = FixtureCatalog(config_loader)
    jobs: List[Job] = [(list(cmd), None) for cmd in STANDALONE]
    for fixture in config_loader.list_fixtures():
        jobs.extend(fixture_jobs(fixture, catalog.get(fixture)))

    failures = 0
    for command, feed in jobs:
        stdin = run(feed, args.threads[0])[1] if feed is not None else None
        first = run(command, args.threads[0], stdin)
        second = run(command, args.threads[1], stdin)
        label = " ".join(command) if feed is None else f"{' '.join(feed)} | {' '.join(command)}"
        if first == second:
            print(f"✓ {label} (exit {first[0]})")
        else:
            failures += 1
            print(f"❌ {label}: outputs differ between {args.threads[0]} and {args.threads[1]} threads")

    print(f"\n{len(jobs) - failures}/{len(jobs)} commands deterministic")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
