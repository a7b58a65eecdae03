"""End-to-end demo: trace the two-step sum model, project it, embed it back.

Run from the repository root:

    python3 scripts/fibonacci_demo.py
"""

from pathlib import Path

from rwdyn import model_trace, project, trajectory
from rwdyn.dsl import parse_model, print_expr

MODEL = Path(__file__).resolve().parent.parent / "models" / "fibonacci.rwm"


def main() -> None:
    mf = parse_model(MODEL.read_text())
    model = mf.rewriting_model()
    values = model_trace(model, 9)
    print("model trace:     ", [int(v) for v in values])

    ps = project(model)
    print("state dimension: ", ps.system.dim)
    print("initial state:   ", tuple(int(v) for v in ps.x0))
    print("context:         ", print_expr(ps.context))
    print("projected trace: ", [int(v) for v in ps.outputs(9)])

    hidden = trajectory(ps.system, ps.x0, 9, keep_states=True).states
    print("hidden states:   ", [tuple(int(x) for x in s) for s in hidden])
    assert ps.outputs(9) == values


if __name__ == "__main__":
    main()
