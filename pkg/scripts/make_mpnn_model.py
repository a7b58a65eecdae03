"""Regenerate models/mpnn3.rwm: a 3-vertex triangle message-passing system.

Per-vertex state is one float; a message is the neighbor's value, the update
adds the aggregated message to the own state, and the readout sums all
vertices.  One step therefore multiplies the state by I + A for the triangle
adjacency A.
"""

from pathlib import Path

from rwdyn import ADD, IOTA, Proj, Signature, mpnn_system
from rwdyn.dsl import ModelFile, print_model

OUT = Path(__file__).resolve().parent.parent / "models" / "mpnn3.rwm"

HEADER = """\
# Triangle message-passing system (3 vertices, scalar hidden states).
# message = neighbor value, update = own value + aggregated messages,
# readout = sum over vertices.  Regenerated by scripts/make_mpnn_model.py.
"""


def main() -> None:
    sys = mpnn_system(
        n_vertices=3,
        edges=[(0, 1), (1, 2), (0, 2)],
        message=Proj(2),
        update=ADD,
        readout=ADD,
        hidden_dim=1,
    )
    mf = ModelFile(
        signature=Signature((IOTA,)),
        system=sys,
        initial_state=(1, 0, 0),
    )
    OUT.write_text(HEADER + print_model(mf))
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
