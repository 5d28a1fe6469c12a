# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled inner loops; same contract as ``_purekernel``.

Odd masks are handled as C integers when they fit in 63 bits, which covers
every chart this package builds in practice; wider masks fall back to
Python integer arithmetic.
"""

cdef enum:
    FIELD_MASK = 0xFFFF

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int _inversions(unsigned long long a, unsigned long long b) nogil:
    cdef int inv = 0
    cdef unsigned long long low
    while b:
        low = b & (~b + 1)
        inv += __builtin_popcountll(a & ~((low << 1) - 1))
        b ^= low
    return inv


cdef int _sign_py(object a, object b):
    cdef int inv = 0
    while b:
        low = b & -b
        inv += (a & ~((low << 1) - 1)).bit_count()
        b ^= low
    return -1 if inv & 1 else 1


cpdef int odd_sign(object a, object b):
    if a & b:
        return 0
    if a.bit_length() < 64 and b.bit_length() < 64:
        return -1 if _inversions(a, b) & 1 else 1
    return _sign_py(a, b)


def mul_terms(dict a, dict b):
    cdef dict out = {}
    cdef list bl = list(b.items())
    cdef unsigned long long ua, ub
    cdef int sign, narrow
    cdef object ea, oa, ca, eb, ob, cb, e, key, c, prev
    for (ea, oa), ca in a.items():
        narrow = oa.bit_length() < 64
        if narrow:
            ua = oa
        for (eb, ob), cb in bl:
            if oa & ob:
                continue
            if narrow and ob.bit_length() < 64:
                ub = ob
                sign = -1 if _inversions(ua, ub) & 1 else 1
            else:
                sign = _sign_py(oa, ob)
            e = ea + eb
            if (e & FIELD_MASK) == 2:
                e = e - 2
                sign = -sign
            key = (e, oa | ob)
            c = ca * cb
            if sign < 0:
                c = -c
            prev = out.get(key)
            if prev is not None:
                c = c + prev
                if not c:
                    del out[key]
                    continue
            out[key] = c
    return out


def add_terms(dict a, dict b, scale=1):
    cdef dict out = dict(a)
    cdef object key, cb, c
    for key, cb in b.items():
        c = out.get(key, 0) + cb * scale
        if c:
            out[key] = c
        else:
            out.pop(key, None)
    return out


def derive_odd(dict terms, int bit):
    cdef dict out = {}
    cdef object g = (<object>1) << bit
    cdef object below = g - 1
    cdef object e, o, c
    for (e, o), c in terms.items():
        if o & g:
            if (o & below).bit_count() & 1:
                c = -c
            out[(e, o ^ g)] = c
    return out


def derive_even(dict terms, int shift):
    cdef dict out = {}
    cdef object one = (<object>1) << shift
    cdef object e, o, c
    cdef long k
    for (e, o), c in terms.items():
        k = (e >> shift) & FIELD_MASK
        if k:
            out[(e - one, o)] = c * k
    return out
