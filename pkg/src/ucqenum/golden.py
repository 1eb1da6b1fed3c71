"""Reference queries with their expected classification."""

GOLDEN = {
    "intro": (
        "Q1(x,y,w) <- R1(x,z), R2(z,y), R3(y,w).\n"
        "Q2(x,y,w) <- R1(x,y), R2(y,w).",
        "Tractable", None,
    ),
    "yellow": (
        "Q1(x,y,v,u) <- R1(x,z1), R2(z1,z2), R3(z2,z3), R4(z3,y), R5(y,v,u).\n"
        "Q2(x,y,v,u) <- R1(x,y), R2(y,v), R3(v,z1), R4(z1,u), R5(u,t1,t2).\n"
        "Q3(x,y,v,u) <- R1(x,z1), R2(z1,y), R3(y,v), R4(v,u), R5(u,t1,t2).",
        "Tractable", None,
    ),
    "hards-are-easy": (
        "Q1(w,y,x,z), Q2(x,y,w,v) <- R1(w,v), R2(v,y), R3(y,z), R4(z,x).",
        "Tractable", None,
    ),
    "body-iso-matmul": (
        "Q1(x,y,v) <- R1(x,z), R2(z,y), R3(y,v), R4(v,w).\n"
        "Q2(x,y,v) <- R1(w,v), R2(v,y), R3(y,z), R4(z,x).",
        "Intractable", "mat-mul",
    ),
    "acyclic-4clique": (
        "Q1(x,y,t), Q2(x,y,w) <- R1(x,w,t), R2(y,w,t).",
        "Intractable", "4-clique",
    ),
    "intractables": (
        "Q1(x,y) <- R1(x,y), R2(y,u), R3(x,u).\n"
        "Q2(x,y) <- R1(y,v), R2(v,x), R3(y,x).\n"
        "Q3(x,y) <- R1(x,z), R2(y,z).",
        "Intractable", None,
    ),
    "cyclic-easy": (
        "Q1(x,y,z,w) <- R1(y,z,w,x), R2(t,y,w), R3(t,z,w), R4(t,y,z).\n"
        "Q2(x,y,z,w) <- R1(x,z,w,v), R2(y,x,w).",
        "Tractable", None,
    ),
    "separated": (
        "Q1(x,y,w) <- R1(x,z), R2(z,y), R3(y,w).\n"
        "Q2(x,y,w) <- R1(x,t1), R2(t2,y), R3(w,t3).",
        "Unknown", None,
    ),
    "star": (
        "Q1(x1,x2,x3), Q2(x1,x2,z), Q3(x1,x3,z), Q4(x2,x3,z) <- R1(x1,z), R2(x2,z), R3(x3,z).",
        "Unknown", None,
    ),
    "cyclic-guarded-hard": (
        "Q1(x,z,y,v) <- R1(x,z,v), R2(z,y,v), R3(y,x,v).\n"
        "Q2(x,z,y,v) <- R1(x,z,v), R2(y,t1,v), R3(t2,x,v).",
        "Unknown", None,
    ),
    "newtetra": (
        "Q1(x2,x3,x4) <- R1(x2,x3,x4), R2(x1,x3,x4), R3(x1,x2,x4).\n"
        "Q2(x2,x3,x4) <- R1(x2,x3,x1), R2(x4,x3,v).",
        "Unknown", None,
    ),
}

# extra tractable shapes used by the engine tests
EXTRA = {
    "redundancy": (
        "Q1(x,y) <- R1(x,y), R2(y,z), R3(z,x).\n"
        "Q2(x,y) <- R1(x,y), R2(y,z).",
        "Tractable", None,
    ),
    "cyclic-free-path": (
        "Q1(x,y,v) <- R1(v,z,x), R2(y,v), R3(z,y).\n"
        "Q2(x,y,v) <- R1(y,v,z), R2(x,y).",
        "Unknown", None,
    ),
}


def golden_queries(extra=False) -> dict:
    from .query import parse_ucq

    items = dict(GOLDEN)
    if extra:
        items.update(EXTRA)
    return {name: parse_ucq(text) for name, (text, _, _) in items.items()}


def tractable_names(extra=False) -> list:
    items = dict(GOLDEN, **(EXTRA if extra else {}))
    return [n for n, (_, kind, _) in items.items() if kind == "Tractable"]
