"""Legacy ASCII VTK snapshots and CSV time series.

The VTK writer emits an unstructured grid whose points are all element GLL
nodes and whose cells are the p x p quad subcells of each element, with
phi' as point scalars and the velocity (U/phi, V/phi, 0) as point vectors.
Numbers are printed with 17 significant digits so files round-trip float64
exactly and repeated runs are byte-identical.
"""

import os

import numpy as np

from .mesh import gll_node_coords


def _fmt(value):
    return f"{value:.17g}"


def write_vtk(field, mesh, basis, path, phi_bar, title="swemix snapshot"):
    """Write one state snapshot as a legacy ASCII VTK unstructured grid."""
    n1 = basis.n
    coords = gll_node_coords(mesh, basis).reshape(-1, 2)
    npoints = coords.shape[0]
    ncells = mesh.num_elements * basis.order**2

    lines = ["# vtk DataFile Version 3.0", title, "ASCII", "DATASET UNSTRUCTURED_GRID"]
    lines.append(f"POINTS {npoints} double")
    for x, y in coords:
        lines.append(f"{_fmt(x)} {_fmt(y)} 0")

    lines.append(f"CELLS {ncells} {5 * ncells}")
    for e in range(mesh.num_elements):
        base = e * n1 * n1
        for j in range(basis.order):
            for i in range(basis.order):
                a = base + j * n1 + i
                b = a + 1
                c = base + (j + 1) * n1 + i + 1
                d = c - 1
                lines.append(f"4 {a} {b} {c} {d}")
    lines.append(f"CELL_TYPES {ncells}")
    lines.extend(["9"] * ncells)

    flat = field.data.reshape(-1, 3)
    lines.append(f"POINT_DATA {npoints}")
    lines.append("SCALARS phi_prime double")
    lines.append("LOOKUP_TABLE default")
    for row in flat:
        lines.append(_fmt(row[0]))
    lines.append("VECTORS velocity double")
    for row in flat:
        total = phi_bar + row[0]
        lines.append(f"{_fmt(row[1] / total)} {_fmt(row[2] / total)} 0")

    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def read_vtk_point_data(path):
    """Parse points, phi' scalars, and velocity vectors back from a legacy
    VTK file written by write_vtk (round-trip checks)."""
    with open(path, "r", encoding="ascii") as fh:
        tokens = fh.read().split("\n")
    pidx = next(i for i, l in enumerate(tokens) if l.startswith("POINTS"))
    npoints = int(tokens[pidx].split()[1])
    pts = np.array([[float(v) for v in tokens[pidx + 1 + k].split()] for k in range(npoints)])
    sidx = tokens.index("LOOKUP_TABLE default")
    phi = np.array([float(tokens[sidx + 1 + k]) for k in range(npoints)])
    vidx = next(i for i, l in enumerate(tokens) if l.startswith("VECTORS velocity"))
    vel = np.array([[float(v) for v in tokens[vidx + 1 + k].split()] for k in range(npoints)])
    return pts, phi, vel


class CsvSeriesWriter:
    """Accumulate one diagnostics row per step and write deterministically."""

    def __init__(self, path, with_errors):
        self.path = path
        self.with_errors = with_errors
        header = ["step", "t", "mass", "energy"]
        if with_errors:
            header += ["l2_phi", "l2_u", "l2_v"]
        self.rows = [",".join(header)]

    def add(self, step, t, mass, energy, errors=None):
        row = [str(step), _fmt(t), _fmt(mass), _fmt(energy)]
        if self.with_errors:
            row += [_fmt(v) for v in errors]
        self.rows.append(",".join(row))

    def write(self):
        os.makedirs(os.path.dirname(os.path.abspath(self.path)), exist_ok=True)
        with open(self.path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(self.rows) + "\n")
        return self.path
