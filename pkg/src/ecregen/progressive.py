"""Bookkeeping shared by the MSR and MBR progressive reconstruction loops."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .gfmatrix import GfMatrix, mat_inv, mul_arrays, pivot_columns


@dataclass
class Reconstruction:
    message: list
    accessed: list
    bad_nodes: list
    rounds: int

    @property
    def nodes_accessed(self) -> int:
        return len(self.accessed)


def fetch_more(state, fetch, count) -> bool:
    """Pull up to ``count`` more available nodes in access order.

    Unavailable nodes (fetch returns None) are skipped.  Returns False when no
    new node could be added.
    """
    added = 0
    order = state["order"]
    while added < count and state["next"] < len(order):
        node = order[state["next"]]
        state["next"] += 1
        symbols = fetch(node)
        if symbols is None:
            continue
        state["accessed"].append(node)
        state["shares"][node] = list(symbols)
        added += 1
    return added > 0


def encoding_map(code):
    """B x (n*alpha) matrix: message row vector -> every node's share, node-major."""
    p = code.params
    rows = []
    for t in range(p.B):
        unit = [0] * p.B
        unit[t] = 1
        rows.append([s for sh in code.encode(unit) for s in sh.symbols])
    return np.array(rows, dtype=np.int64)


def share_columns(nodes, alpha):
    return [i * alpha + r for i in nodes for r in range(alpha)]


def linear_decoder(code, nodes):
    """(columns, inverse) recovering a block from the shares of ``nodes`` alone.

    ``message = shares[columns] @ inverse``; None if the nodes do not
    determine the message.
    """
    f, alpha = code.field, code.params.alpha
    sub = GfMatrix(f, code.encoding_map[:, share_columns(nodes, alpha)])
    piv = pivot_columns(sub)
    if len(piv) < code.params.B:
        return None
    return piv, mat_inv(sub.select_cols(piv)).data


def recover_blocks(code, shares, accessed, recover_block):
    """Decode every block seen by one reconstruction round.

    Block 0 goes through ``recover_block`` (the full error-locating decoder).
    Nodes whose block-0 share disagrees with its re-encoding are suspects; the
    remaining blocks are then solved linearly from k unsuspected nodes and
    accepted only if the re-encoding matches every unsuspected node.  Blocks
    that do not match fall back to ``recover_block``.

    Returns ``(symbols or None, flagged nodes)``.
    """
    p, f = code.params, code.field
    alpha, k = p.alpha, p.k
    blocks = len(shares[accessed[0]]) // alpha
    first, flagged = recover_block(0)
    flagged = set(flagged)
    if first is None:
        return None, flagged
    enc = code.encoding_map
    cw0 = mul_arrays(f, np.array([first], dtype=np.int64), enc)[0]
    suspects = {node for node in accessed
                if cw0[node * alpha:(node + 1) * alpha].tolist() != shares[node][:alpha]}
    flagged |= suspects
    if blocks == 1:
        return first, flagged

    trusted = [node for node in accessed if node not in suspects]
    decoder = linear_decoder(code, tuple(trusted[:k])) if len(trusted) >= k else None
    stack = np.array([shares[node] for node in trusted], dtype=np.int64)
    # rows: blocks 1.., columns: trusted shares node-major
    observed = stack.reshape(len(trusted), blocks, alpha)[:, 1:, :].transpose(1, 0, 2)
    observed = observed.reshape(blocks - 1, -1)
    if decoder is not None:
        piv, inv = decoder
        basis = observed[:, : k * alpha]
        msgs = mul_arrays(f, basis[:, piv], inv)
        again = mul_arrays(f, msgs, enc[:, share_columns(trusted, alpha)])
        agree = np.all(again == observed, axis=1)
    else:
        msgs = np.zeros((blocks - 1, p.B), dtype=np.int64)
        agree = np.zeros(blocks - 1, dtype=bool)

    out = [first]
    for b in range(1, blocks):
        if agree[b - 1]:
            out.append(msgs[b - 1].tolist())
            continue
        block, more = recover_block(b)
        flagged.update(more)
        if block is None:
            return None, flagged
        out.append(block)
    return [s for block in out for s in block], flagged


def encode_blocks(code, symbols):
    """Per-node symbol lists for consecutive B-symbol blocks (block-major within a node)."""
    p = code.params
    if len(symbols) % p.B:
        raise DimensionError(f"{len(symbols)} symbols is not a multiple of B={p.B}")
    msgs = np.asarray(symbols, dtype=np.int64).reshape(-1, p.B)
    if not len(msgs):
        return [[] for _ in range(p.n)]
    coded = mul_arrays(code.field, msgs, code.encoding_map)  # blocks x (n*alpha)
    per_node = coded.reshape(len(msgs), p.n, p.alpha).transpose(1, 0, 2).reshape(p.n, -1)
    return per_node.tolist()
