"""Pure-Python brute-force validity kernel.

Same calling convention as the compiled ``_validity_ext.search``; used when the
extension is not built or ``BELNAP_PURE_PYTHON`` is set.
"""

OP_ATOM, OP_NEG, OP_AND, OP_OR, OP_FORALL, OP_EXISTS = range(6)


def _run(ops, args, start, stop, assignment, stack, neg_t, and_t, or_t, forall_t, exists_t):
    sp = 0
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
            mask_u = mask_v = 0
            for i in range(n):
                r = stack[base + 2 * i]
                m = stack[base + 2 * i + 1]
                ru = r // 3
                mask_u |= 1 << (ru * 3 + m // 3)
                mask_v |= 1 << (ru * 3 + m % 3)
            if op == OP_FORALL:
                stack[base] = forall_t[mask_u] * 3 + exists_t[mask_v]
            else:
                stack[base] = exists_t[mask_u] * 3 + forall_t[mask_v]
            sp = base + 1
    return stack[0]


def search(ops, args, starts, n_atoms, order, stack_size,
           neg_t, and_t, or_t, forall_t, exists_t):
    """Enumerate assignments of packed GTVs to ``n_atoms`` atoms.

    ``starts`` delimits the programs: premises first, conclusion last.  Each
    atom cycles through ``order``; atom 0 varies fastest.  Returns
    ``(checked, witness)`` where ``witness`` is the first assignment making
    every premise verified (u = t) but not the conclusion, or None.
    """
    ops = list(ops)
    args = list(args)
    order = list(order)
    n_progs = len(starts) - 1
    digits = [0] * n_atoms
    assignment = [order[0]] * n_atoms
    stack = [0] * max(stack_size, 1)
    checked = 0
    while True:
        checked += 1
        premises_hold = True
        for p in range(n_progs - 1):
            g = _run(ops, args, starts[p], starts[p + 1], assignment, stack,
                     neg_t, and_t, or_t, forall_t, exists_t)
            if g // 3 != 0:
                premises_hold = False
                break
        if premises_hold:
            g = _run(ops, args, starts[n_progs - 1], starts[n_progs], assignment, stack,
                     neg_t, and_t, or_t, forall_t, exists_t)
            if g // 3 != 0:
                return checked, list(assignment)
        i = 0
        while i < n_atoms:
            digits[i] += 1
            if digits[i] < 9:
                assignment[i] = order[digits[i]]
                break
            digits[i] = 0
            assignment[i] = order[0]
            i += 1
        if i == n_atoms:
            return checked, None
