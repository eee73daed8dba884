# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled brute-force validity kernel; see ``_validity_py`` for the contract."""

from libc.stdlib cimport malloc, free

cdef enum:
    OP_ATOM = 0
    OP_NEG = 1
    OP_AND = 2
    OP_OR = 3
    OP_FORALL = 4


cdef int _run(const int *ops, const int *args, int start, int stop,
              const int *assignment, int *stack,
              const int *neg_t, const int *and_t, const int *or_t,
              const int *forall_t, const int *exists_t) nogil:
    cdef int sp = 0, pc, op, n, base, i, r, m, ru, mask_u, mask_v
    for pc in range(start, stop):
        op = ops[pc]
        if op == OP_ATOM:
            stack[sp] = assignment[args[pc]]
            sp += 1
        elif op == OP_NEG:
            stack[sp - 1] = neg_t[stack[sp - 1]]
        elif op == OP_AND:
            sp -= 1
            stack[sp - 1] = and_t[stack[sp - 1] * 9 + stack[sp]]
        elif op == OP_OR:
            sp -= 1
            stack[sp - 1] = or_t[stack[sp - 1] * 9 + stack[sp]]
        else:
            n = args[pc]
            base = sp - 2 * n
            mask_u = 0
            mask_v = 0
            for i in range(n):
                r = stack[base + 2 * i]
                m = stack[base + 2 * i + 1]
                ru = r / 3
                mask_u |= 1 << (ru * 3 + m / 3)
                mask_v |= 1 << (ru * 3 + m % 3)
            if op == OP_FORALL:
                stack[base] = forall_t[mask_u] * 3 + exists_t[mask_v]
            else:
                stack[base] = exists_t[mask_u] * 3 + forall_t[mask_v]
            sp = base + 1
    return stack[0]


cdef int *_copy(seq) except NULL:
    cdef Py_ssize_t i, n = len(seq)
    cdef int *out = <int *> malloc((n if n > 0 else 1) * sizeof(int))
    if out == NULL:
        raise MemoryError()
    for i in range(n):
        out[i] = seq[i]
    return out


def search(ops, args, starts, int n_atoms, order, int stack_size,
           neg_t, and_t, or_t, forall_t, exists_t):
    cdef int n_progs = len(starts) - 1
    cdef int *c_ops = _copy(ops)
    cdef int *c_args = _copy(args)
    cdef int *c_starts = _copy(starts)
    cdef int *c_order = _copy(order)
    cdef int *c_neg = _copy(neg_t)
    cdef int *c_and = _copy(and_t)
    cdef int *c_or = _copy(or_t)
    cdef int *c_forall = _copy(forall_t)
    cdef int *c_exists = _copy(exists_t)
    cdef int *digits = _copy([0] * n_atoms)
    cdef int *assignment = _copy([order[0]] * n_atoms)
    cdef int *stack = _copy([0] * max(stack_size, 1))
    cdef long long checked = 0
    cdef int p, g, i
    cdef bint premises_hold, found = False
    try:
        with nogil:
            while True:
                checked += 1
                premises_hold = True
                for p in range(n_progs - 1):
                    g = _run(c_ops, c_args, c_starts[p], c_starts[p + 1], assignment, stack,
                             c_neg, c_and, c_or, c_forall, c_exists)
                    if g / 3 != 0:
                        premises_hold = False
                        break
                if premises_hold:
                    g = _run(c_ops, c_args, c_starts[n_progs - 1], c_starts[n_progs],
                             assignment, stack, c_neg, c_and, c_or, c_forall, c_exists)
                    if g / 3 != 0:
                        found = True
                        break
                i = 0
                while i < n_atoms:
                    digits[i] += 1
                    if digits[i] < 9:
                        assignment[i] = c_order[digits[i]]
                        break
                    digits[i] = 0
                    assignment[i] = c_order[0]
                    i += 1
                if i == n_atoms:
                    break
        witness = [assignment[i] for i in range(n_atoms)] if found else None
        return checked, witness
    finally:
        free(c_ops); free(c_args); free(c_starts); free(c_order)
        free(c_neg); free(c_and); free(c_or); free(c_forall); free(c_exists)
        free(digits); free(assignment); free(stack)
