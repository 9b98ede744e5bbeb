# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled interpreter for compiled sentences over bit-mask powersets.

Same bytecode and entry points as the pure Python fallback; subsets are
64-bit masks, so the structure size is capped well below 64 by the budget
checks upstream.
"""

cdef enum:
    OP_PUSH0 = 0
    OP_PUSH1 = 1
    OP_PUSHV = 2
    OP_MEET = 3
    OP_JOIN = 4
    OP_COMP = 5
    OP_ROT = 6
    OP_PUSHT = 7

cdef enum:
    K_EQ = 0
    K_LE = 1
    K_NOT = 2
    K_AND = 3
    K_OR = 4
    K_IMPLIES = 5
    K_EXISTS = 6
    K_FORALL = 7

DEF MAX_ENV = 64
DEF MAX_STACK = 256


cdef class _Ctx:
    cdef long long[::1] bkind, ba, bb, bc, bchild, tops, targ, tstart, tlen, reps
    cdef long long env[MAX_ENV]
    cdef long long full
    cdef int n
    cdef bint use_reps

    cdef long long term(self, Py_ssize_t ti):
        cdef long long st[MAX_STACK]
        cdef int sp = 0
        cdef Py_ssize_t idx, stop
        cdef long long op, v
        cdef int s
        idx = self.tstart[ti]
        stop = idx + self.tlen[ti]
        while idx < stop:
            op = self.tops[idx]
            if op == OP_MEET:
                sp -= 1
                st[sp - 1] = st[sp - 1] & st[sp]
            elif op == OP_JOIN:
                sp -= 1
                st[sp - 1] = st[sp - 1] | st[sp]
            elif op == OP_COMP:
                st[sp - 1] = (~st[sp - 1]) & self.full
            elif op == OP_ROT:
                s = <int> (self.targ[idx] % self.n)
                if s < 0:
                    s += self.n
                if s != 0:
                    v = st[sp - 1]
                    st[sp - 1] = ((v << s) | (v >> (self.n - s))) & self.full
            elif op == OP_PUSHV:
                st[sp] = self.env[self.targ[idx]]
                sp += 1
            elif op == OP_PUSH0:
                st[sp] = 0
                sp += 1
            else:
                st[sp] = self.full
                sp += 1
            idx += 1
        return st[sp - 1]

    cdef bint block(self, Py_ssize_t bi):
        cdef long long k = self.bkind[bi]
        cdef long long a = self.ba[bi]
        cdef long long b = self.bb[bi]
        cdef Py_ssize_t i, count
        cdef long long m
        cdef bint r
        if k == K_EQ:
            return self.term(a) == self.term(b)
        if k == K_LE:
            return (self.term(a) & (self.full ^ self.term(b))) == 0
        if k == K_NOT:
            return not self.block(a)
        if k == K_AND:
            for i in range(b):
                if not self.block(self.bchild[a + i]):
                    return False
            return True
        if k == K_OR:
            for i in range(b):
                if self.block(self.bchild[a + i]):
                    return True
            return False
        if k == K_IMPLIES:
            if not self.block(a):
                return True
            return self.block(b)
        # quantifiers: a = variable slot, b = body block
        if self.use_reps and self.bc[bi]:
            count = self.reps.shape[0]
            if k == K_EXISTS:
                for i in range(count):
                    self.env[a] = self.reps[i]
                    if self.block(b):
                        return True
                return False
            for i in range(count):
                self.env[a] = self.reps[i]
                if not self.block(b):
                    return False
            return True
        if k == K_EXISTS:
            for m in range(self.full + 1):
                self.env[a] = m
                if self.block(b):
                    return True
            return False
        for m in range(self.full + 1):
            self.env[a] = m
            if not self.block(b):
                return False
        return True


def eval_compiled(long long[::1] bkind, long long[::1] ba, long long[::1] bb,
                  long long[::1] bc, long long[::1] bchild,
                  long long[::1] tops, long long[::1] targ,
                  long long[::1] tstart, long long[::1] tlen,
                  long long root, long long n_vars, int n,
                  long long[::1] reps, int use_reps):
    cdef _Ctx ctx = _Ctx()
    ctx.bkind = bkind
    ctx.ba = ba
    ctx.bb = bb
    ctx.bc = bc
    ctx.bchild = bchild
    ctx.tops = tops
    ctx.targ = targ
    ctx.tstart = tstart
    ctx.tlen = tlen
    ctx.reps = reps
    ctx.n = n
    ctx.full = (<long long> 1 << n) - 1
    ctx.use_reps = use_reps != 0
    cdef Py_ssize_t i
    for i in range(MAX_ENV):
        ctx.env[i] = 0
    return 1 if ctx.block(root) else 0


def eval_terms(long long[::1] tops, long long[::1] targ,
               long long[::1] tstart, long long[::1] tlen,
               long long[::1] env, int n, long long[::1] out):
    cdef long long full = (<long long> 1 << n) - 1
    cdef long long st[MAX_STACK]
    cdef int sp
    cdef Py_ssize_t ti, idx, stop
    cdef long long op, v
    cdef int s
    for ti in range(tstart.shape[0]):
        sp = 0
        idx = tstart[ti]
        stop = idx + tlen[ti]
        while idx < stop:
            op = tops[idx]
            if op == OP_MEET:
                sp -= 1
                st[sp - 1] = st[sp - 1] & st[sp]
            elif op == OP_JOIN:
                sp -= 1
                st[sp - 1] = st[sp - 1] | st[sp]
            elif op == OP_COMP:
                st[sp - 1] = (~st[sp - 1]) & full
            elif op == OP_ROT:
                s = <int> (targ[idx] % n)
                if s < 0:
                    s += n
                if s != 0:
                    v = st[sp - 1]
                    st[sp - 1] = ((v << s) | (v >> (n - s))) & full
            elif op == OP_PUSHV:
                st[sp] = env[targ[idx]]
                sp += 1
            elif op == OP_PUSHT:
                st[sp] = out[targ[idx]]
                sp += 1
            elif op == OP_PUSH0:
                st[sp] = 0
                sp += 1
            else:
                st[sp] = full
                sp += 1
            idx += 1
        out[ti] = st[sp - 1]
    return out
