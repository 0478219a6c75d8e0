"""Read and write conic programs in the SDPA sparse format (``.dat-s``).

The file encodes ``min c.x`` subject to ``sum_i x_i F_i - F_0 >= 0`` blockwise,
which matches :class:`~sipsolve.conic.ConicProgram` with ``F_0 = -A0`` and
``F_i = A_i``.  Affine equality rows have no native slot in the format, so the
writer appends one diagonal block holding each equality as a pair of opposite
inequalities; the reader recognizes that trailing paired block and merges it
back, making export -> import the identity on our own files.
"""

from __future__ import annotations

import numpy as np

from .conic import ConicError, ConicProgram, PsdBlock


def export_sdpa(program: ConicProgram, path: str, comment: str = ""):
    """Write the program to ``path`` in SDPA sparse format."""
    program.validate()
    lines = []
    if comment:
        for c in comment.splitlines():
            lines.append(f'"{c}')
    m = program.num_vars
    block_sizes = [b.size for b in program.blocks]
    neq = len(program.eq_rows)
    if neq:
        block_sizes.append(-2 * neq)
    lines.append(f"{m}")
    lines.append(f"{len(block_sizes)}")
    lines.append(" ".join(str(s) for s in block_sizes))
    lines.append(" ".join(repr(float(c)) for c in program.objective))
    for bno, blk in enumerate(program.blocks, start=1):
        for var in sorted(blk.entries):
            acc: dict[tuple[int, int], float] = {}
            for i, j, c in blk.entries[var]:
                acc[(i, j)] = acc.get((i, j), 0.0) + c
            for (i, j), c in sorted(acc.items()):
                if c == 0.0:
                    continue
                # file stores F_0 with A0 = -F_0
                val = -c if var < 0 else c
                lines.append(f"{max(var + 1, 0)} {bno} {i + 1} {j + 1} {val!r}")
    if neq:
        bno = len(block_sizes)
        for r, (row, rhs) in enumerate(zip(program.eq_rows, program.eq_rhs)):
            ip, im = 2 * r + 1, 2 * r + 2
            if rhs != 0.0:
                lines.append(f"0 {bno} {ip} {ip} {rhs!r}")
                lines.append(f"0 {bno} {im} {im} {-rhs!r}")
            for var in sorted(row):
                c = row[var]
                if c == 0.0:
                    continue
                lines.append(f"{var + 1} {bno} {ip} {ip} {c!r}")
                lines.append(f"{var + 1} {bno} {im} {im} {-c!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _tokenize(path: str):
    structured = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line[0] in '"*':
                continue
            cleaned = line.replace(",", " ").replace("(", " ").replace(")", " ")
            cleaned = cleaned.replace("{", " ").replace("}", " ")
            structured.append(cleaned.split())
    return structured


def import_sdpa(path: str) -> ConicProgram:
    """Parse an SDPA sparse file back into a :class:`ConicProgram`.

    A trailing diagonal block of even size whose odd/even entries exactly
    negate each other is decoded as equality rows (the writer's encoding);
    any other diagonal block is kept as a PSD block of diagonal matrices.
    """
    rows = _tokenize(path)
    flat = [tok for row in rows for tok in row]
    pos = 0

    def take(k):
        nonlocal pos
        out = flat[pos:pos + k]
        if len(out) < k:
            raise ConicError("truncated SDPA file")
        pos += k
        return out

    m = int(float(take(1)[0]))
    nblk = int(float(take(1)[0]))
    sizes = [int(float(t)) for t in take(nblk)]
    c = np.array([float(t) for t in take(m)])
    entries = flat[pos:]
    if len(entries) % 5 != 0:
        raise ConicError("entry section is not a run of 5-tuples")
    blocks = [PsdBlock(abs(s)) for s in sizes]
    diag = [s < 0 for s in sizes]
    for t in range(0, len(entries), 5):
        matno, bno, i, j, val = entries[t:t + 5]
        matno, bno = int(float(matno)), int(float(bno))
        i, j, val = int(float(i)) - 1, int(float(j)) - 1, float(val)
        if not (1 <= bno <= nblk):
            raise ConicError(f"block number {bno} out of range")
        if diag[bno - 1] and i != j:
            raise ConicError("off-diagonal entry in a diagonal block")
        blocks[bno - 1].add(matno - 1 if matno else -1, i, j,
                            -val if matno == 0 else val)
    eq_rows: list[dict[int, float]] = []
    eq_rhs: list[float] = []
    if blocks and diag[-1] and sizes[-1] % 2 == 0:
        if _decode_equalities(blocks[-1], eq_rows, eq_rhs):
            blocks = blocks[:-1]
        else:
            eq_rows, eq_rhs = [], []
    prog = ConicProgram(num_vars=m, objective=c, blocks=blocks,
                        eq_rows=eq_rows, eq_rhs=eq_rhs)
    prog.validate()
    return prog


def _decode_equalities(blk: PsdBlock, eq_rows, eq_rhs) -> bool:
    npairs = blk.size // 2
    cols: list[dict[int, float]] = [dict() for _ in range(blk.size)]
    for var, triples in blk.entries.items():
        for i, j, c in triples:
            cols[i][var] = cols[i].get(var, 0.0) + c
    for r in range(npairs):
        plus, minus = cols[2 * r], cols[2 * r + 1]
        if set(plus) != set(minus):
            return False
        if any(plus[k] != -minus[k] for k in plus):
            return False
        # constant slot: A0 entry is -rhs for the plus row (F_0 holds +rhs)
        rhs = -plus.pop(-1, 0.0)
        minus.pop(-1, None)
        if not plus:
            return False
        eq_rows.append(dict(plus))
        eq_rhs.append(float(rhs))
    return True
