"""Pure-Python inner loops for term dictionaries.

A term dictionary maps ``(even, odd)`` keys to nonzero rational coefficients.
``even`` packs exponents into 16-bit fields, field 0 being the exponent of the
imaginary unit; ``odd`` is a bitmask of odd generators in global order.
The compiled module ``_speedups`` exposes the same functions.
"""

FIELD_BITS = 16
FIELD_MASK = (1 << FIELD_BITS) - 1


def odd_sign(a, b):
    """Sign of ``a * b`` once the concatenated odd generators are sorted."""
    if a & b:
        return 0
    inversions = 0
    while b:
        low = b & -b
        inversions += (a & ~((low << 1) - 1)).bit_count()
        b ^= low
    return -1 if inversions & 1 else 1


def mul_terms(a, b):
    out = {}
    get = out.get
    for (ea, oa), ca in a.items():
        for (eb, ob), cb in b.items():
            if oa & ob:
                continue
            sign = odd_sign(oa, ob)
            e = ea + eb
            if e & FIELD_MASK == 2:
                e -= 2
                sign = -sign
            key = (e, oa | ob)
            c = ca * cb if sign > 0 else -(ca * cb)
            prev = get(key)
            if prev is not None:
                c += prev
                if not c:
                    del out[key]
                    continue
            out[key] = c
    return out


def add_terms(a, b, scale=1):
    out = dict(a)
    for key, cb in b.items():
        c = out.get(key, 0) + cb * scale
        if c:
            out[key] = c
        else:
            out.pop(key, None)
    return out


def derive_odd(terms, bit):
    """Left derivative by the odd generator at ``bit``."""
    out = {}
    g = 1 << bit
    below = g - 1
    for (e, o), c in terms.items():
        if o & g:
            if (o & below).bit_count() & 1:
                c = -c
            out[(e, o ^ g)] = c
    return out


def derive_even(terms, shift):
    """Power-rule derivative by the even generator whose field starts at ``shift``."""
    out = {}
    one = 1 << shift
    for (e, o), c in terms.items():
        k = (e >> shift) & FIELD_MASK
        if k:
            out[(e - one, o)] = c * k
    return out
