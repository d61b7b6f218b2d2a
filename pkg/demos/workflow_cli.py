"""Drive the command-line front end from a declarative workflow file.

Writes a workflow JSON, validates it, runs it, and prints the report's
headline fields.  The same flow then runs against a degraded backend to
show the failing branch and its exit status.
"""

import json
import tempfile
from pathlib import Path

from qguard.cli import main as qguard_main


def workflow(p2):
    return {
        "backend": {
            "type": "simulator",
            "noise": {"p1": 0.0, "p2": p2, "readout_flip": 0.0},
            "seed": 99,
        },
        "constraint": {
            "type": "and",
            "children": [
                {"type": "calibration", "criteria": {"min_qubits": 8}},
                {"type": "packed_chsh", "policy": {"kind": "min", "threshold": 2.2}},
            ],
        },
        "main_circuit": {
            "num_qubits": 2,
            "gates": [
                {"kind": "H", "targets": [0]},
                {"kind": "CNOT", "targets": [0, 1]},
            ],
            "measure": [0, 1],
        },
        "constraint_shots": 10_000,
        "main_shots": 2048,
        "report_path": "report.json",
    }


def run_one(directory, label, p2):
    config = directory / f"{label}.json"
    config.write_text(json.dumps(workflow(p2), indent=2))

    status = qguard_main(["validate", str(config)])
    print(f"{label}: validate exit {status}")

    status = qguard_main(["run", str(config), "--report", str(directory / f"{label}_report.json")])
    report = json.loads((directory / f"{label}_report.json").read_text())
    chsh = report["introspection"]["children"][-1]["scores"]["CHSH_score"]
    print(f"{label}: run exit {status}, branch={report['branch']}, S={chsh:.4f}")
    if "main_result" in report:
        print(f"{label}: main counts {report['main_result']['counts']}")
    print()


def main():
    with tempfile.TemporaryDirectory() as tmp:
        run_one(Path(tmp), "clean", p2=0.0)
        run_one(Path(tmp), "degraded", p2=0.3)


if __name__ == "__main__":
    main()
