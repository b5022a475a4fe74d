"""Refresh tests/golden/ from a pipeline run on the bundled fixture.

Only run this after an intentional change to ranking output.

    python scripts/update_golden.py
"""

import shutil
import sys
import tempfile
from pathlib import Path

from topicnet.cli import run

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"
PATTERNS = ("ranking_*.csv", "rollup_rank_*.csv", "diff_node_ranking.csv", "diff_community_ranking.csv")


def main():
    with tempfile.TemporaryDirectory() as tmp:
        if run(["pipeline", "--config", str(ROOT / "fixtures" / "example.toml"), "--out", tmp]) != 0:
            sys.exit("pipeline failed")
        GOLDEN.mkdir(parents=True, exist_ok=True)
        for pattern in PATTERNS:
            for path in sorted(Path(tmp).glob(pattern)):
                shutil.copy(path, GOLDEN / path.name)
                print(GOLDEN / path.name)


if __name__ == "__main__":
    main()
