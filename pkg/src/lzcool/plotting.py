"""Matplotlib figures for experiment tables (the ``--figure`` report path)."""
import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


LABELS = {
    "velocity": r"$v\ [\Delta^2]$",
    "t": r"$t\ [1/\Delta]$",
    "alpha_z": r"$\alpha_z$",
    "alpha_x": r"$\alpha_x$",
    "p_G": r"$p_G$",
    "p_z": r"$p_G^{(z)}$",
    "p_xz": r"$p_G^{(x,z)}$",
    "gain": r"$(p_G^{(x,z)}-p_G^{(z)})/p_G^{(z)}$",
    "temperature": r"$k_BT$",
}


def _style():
    plt.rcParams.update({
        "font.size": 11,
        "axes.labelsize": 12,
        "legend.fontsize": 9,
        "figure.dpi": 100,
        "savefig.bbox": "tight",
    })


def _line(ax, table):
    x = table.column(table.x)
    groups = table.column(table.group) if table.group else np.zeros(len(x))
    for g in dict.fromkeys(groups.tolist()):
        mask = groups == g
        for name in table.ys:
            label = LABELS.get(name, name) if not table.group else \
                f"{LABELS.get(table.group, table.group)} = {g:g}"
            ax.plot(x[mask], table.column(name)[mask], marker="o" if mask.sum() < 60 else None,
                    ms=3, label=label)
    for key, *vals in table.notes:
        if key == "alpha_z_min":
            ax.axvline(vals[0], color="k", ls=":", lw=1)
    if table.notes and table.notes[0][0] == "scan":
        xs = [n[1] for n in table.notes]
        ys = [n[2] for n in table.notes]
        ax.plot(xs, ys, "o-", ms=3, color="0.5", label="scan")
        ax.plot(x, table.column(table.ys[0]), "r*", ms=10, label="optimum")
    if table.log_x:
        ax.set_xscale("log")
    if table.log_y:
        ax.set_yscale("log")
    ax.set_xlabel(LABELS.get(table.x, table.x))
    ax.set_ylabel(", ".join(LABELS.get(y, y) for y in table.ys))
    ax.legend(frameon=False)


def _matrix(fig, ax, table):
    rows = np.array([r[0] for r in table.rows], dtype=float)
    cols = np.array(table.columns[1:], dtype=float)
    z = np.array([r[1:] for r in table.rows], dtype=float)
    mesh = ax.pcolormesh(cols, rows, z, shading="nearest", cmap="viridis")
    if table.log_x and len(cols) > 1:
        ax.set_xscale("log")
    if table.log_y and len(rows) > 1:
        ax.set_yscale("log")
    row_name, _, col_name = str(table.columns[0]).partition("\\")
    ax.set_xlabel(LABELS.get(col_name, col_name))
    ax.set_ylabel(LABELS.get(row_name, row_name))
    fig.colorbar(mesh, ax=ax, label=LABELS["p_G"])


def render_figure(table, path):
    """Render ``table`` to an image file; the format follows the suffix."""
    _style()
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    try:
        if table.layout == "matrix":
            _matrix(fig, ax, table)
        else:
            _line(ax, table)
        ax.set_title(table.title)
        fig.savefig(path)
    finally:
        plt.close(fig)
    return path
