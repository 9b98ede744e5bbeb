"""Pure Python interpreter for compiled sentences.

Mirrors the compiled extension kernel instruction for instruction; the
arrays are converted to plain lists up front because Python-int arithmetic
is faster than numpy scalar arithmetic in a tight loop.
"""

from __future__ import annotations

OP_PUSH0, OP_PUSH1, OP_PUSHV, OP_MEET, OP_JOIN, OP_COMP, OP_ROT, OP_PUSHT = range(8)
K_EQ, K_LE, K_NOT, K_AND, K_OR, K_IMPLIES, K_EXISTS, K_FORALL = range(8)


def _aslist(a):
    return a.tolist() if hasattr(a, "tolist") else list(a)


def eval_compiled(bkind, ba, bb, bc, bchild, tops, targ, tstart, tlen,
                  root, n_vars, n, reps, use_reps):
    bkind = _aslist(bkind)
    ba = _aslist(ba)
    bb = _aslist(bb)
    bc = _aslist(bc)
    bchild = _aslist(bchild)
    tops = _aslist(tops)
    targ = _aslist(targ)
    tstart = _aslist(tstart)
    tlen = _aslist(tlen)
    reps = _aslist(reps)
    full = (1 << n) - 1
    env = [0] * max(n_vars, 1)

    def term(ti):
        st = []
        push = st.append
        for idx in range(tstart[ti], tstart[ti] + tlen[ti]):
            op = tops[idx]
            if op == OP_MEET:
                v = st.pop()
                st[-1] &= v
            elif op == OP_JOIN:
                v = st.pop()
                st[-1] |= v
            elif op == OP_COMP:
                st[-1] = (~st[-1]) & full
            elif op == OP_ROT:
                s = targ[idx] % n
                if s:
                    v = st[-1]
                    st[-1] = ((v << s) | (v >> (n - s))) & full
            elif op == OP_PUSHV:
                push(env[targ[idx]])
            elif op == OP_PUSH0:
                push(0)
            else:  # OP_PUSH1
                push(full)
        return st[-1]

    def block(bi):
        k = bkind[bi]
        if k == K_EQ:
            return term(ba[bi]) == term(bb[bi])
        if k == K_LE:
            return (term(ba[bi]) & (full ^ term(bb[bi]))) == 0
        if k == K_NOT:
            return not block(ba[bi])
        if k == K_AND:
            start, count = ba[bi], bb[bi]
            return all(block(bchild[start + i]) for i in range(count))
        if k == K_OR:
            start, count = ba[bi], bb[bi]
            return any(block(bchild[start + i]) for i in range(count))
        if k == K_IMPLIES:
            return (not block(ba[bi])) or block(bb[bi])
        slot, body = ba[bi], bb[bi]
        domain = reps if (use_reps and bc[bi]) else range(full + 1)
        if k == K_EXISTS:
            for m in domain:
                env[slot] = m
                if block(body):
                    return True
            return False
        for m in domain:
            env[slot] = m
            if not block(body):
                return False
        return True

    return 1 if block(root) else 0


def eval_terms(tops, targ, tstart, tlen, env, n, out):
    tops = _aslist(tops)
    targ = _aslist(targ)
    tstart = _aslist(tstart)
    tlen = _aslist(tlen)
    env = _aslist(env)
    full = (1 << n) - 1
    vals = []
    for ti in range(len(tstart)):
        st = []
        push = st.append
        for idx in range(tstart[ti], tstart[ti] + tlen[ti]):
            op = tops[idx]
            if op == OP_MEET:
                v = st.pop()
                st[-1] &= v
            elif op == OP_JOIN:
                v = st.pop()
                st[-1] |= v
            elif op == OP_COMP:
                st[-1] = (~st[-1]) & full
            elif op == OP_ROT:
                s = targ[idx] % n
                if s:
                    v = st[-1]
                    st[-1] = ((v << s) | (v >> (n - s))) & full
            elif op == OP_PUSHV:
                push(env[targ[idx]])
            elif op == OP_PUSHT:
                push(vals[targ[idx]])
            elif op == OP_PUSH0:
                push(0)
            else:
                push(full)
        vals.append(st[-1])
    for ti, v in enumerate(vals):
        out[ti] = v
    return out
