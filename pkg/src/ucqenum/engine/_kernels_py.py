"""Pure-Python relational kernels.  ``_ckernels.pyx`` mirrors these
signatures; keys are always tuples."""


def project(rows, positions, eq_pairs=()):
    """Rows satisfying every ``row[a] == row[b]``, cut down to ``positions``
    and deduplicated in first-seen order."""
    seen = set()
    out = []
    positions = tuple(positions)
    eq_pairs = tuple(eq_pairs)
    for row in rows:
        ok = True
        for a, b in eq_pairs:
            if row[a] != row[b]:
                ok = False
                break
        if not ok:
            continue
        t = tuple([row[p] for p in positions])
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def key_set(rows, positions, into=None):
    keys = set() if into is None else into
    positions = tuple(positions)
    for row in rows:
        keys.add(tuple([row[p] for p in positions]))
    return keys


def semijoin(rows, positions, keys):
    positions = tuple(positions)
    return [row for row in rows if tuple([row[p] for p in positions]) in keys]


def build_index(rows, positions, into=None):
    index = {} if into is None else into
    positions = tuple(positions)
    for row in rows:
        k = tuple([row[p] for p in positions])
        bucket = index.get(k)
        if bucket is None:
            index[k] = [row]
        else:
            bucket.append(row)
    return index


def intersect(rows, other):
    """Rows of ``rows`` that also occur in ``other`` (a set)."""
    return [row for row in rows if row in other]
