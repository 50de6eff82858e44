"""JSON schemas for the command-line outputs."""

_assignment = {"type": "object", "additionalProperties": {"type": "integer"}}

VERDICT = {
    "type": "object",
    "required": ["status", "assignment", "branch_trace", "bounds", "stats"],
    "properties": {
        "status": {"enum": ["SAT", "UNSAT", "UNKNOWN"]},
        "assignment": {"oneOf": [{"type": "null"}, _assignment]},
        "branch_trace": {"type": ["object", "null"]},
        "bounds": {"type": "object", "required": ["kind", "bounds", "ledger"]},
        "reason": {"type": "string"},
        "stats": {
            "type": "object",
            "required": ["branches", "diophantine_calls", "wall_time"],
            "properties": {
                "branches": {"type": "integer", "minimum": 0},
                "diophantine_calls": {"type": "integer", "minimum": 0},
                "wall_time": {"type": "number", "minimum": 0},
            },
        },
    },
}

_row = {
    "type": "object",
    "required": ["factor", "constant", "terms"],
    "properties": {
        "factor": {"type": "string"},
        "constant": {"type": "array", "items": {"type": "integer"}},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["variable", "coefficient"],
                "properties": {
                    "variable": {"type": "string"},
                    "coefficient": {"type": "array", "items": {"type": "integer"}},
                },
            },
        },
    },
}

PHI = {
    "type": "object",
    "required": ["branches"],
    "properties": {
        "branches": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["peripheral_rows", "trivial_checks", "variable_map"],
                "properties": {
                    "peripheral_rows": {"type": "array", "items": _row},
                    "trivial_checks": {"type": "array", "items": {"type": "string"}},
                    "variable_map": {"type": "object", "additionalProperties": {"type": "integer"}},
                },
            },
        },
        "free_variables": {"type": "array", "items": {"type": "string"}},
    },
}

BOUNDS = {
    "type": "object",
    "required": ["kind", "bounds", "trace", "ledger"],
    "properties": {
        "kind": {"enum": ["simple", "refined"]},
        "bounds": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
        "trace": {"type": "object"},
        "ledger": {"type": "object", "required": ["M", "provenance"]},
    },
}

CLASSIFY = {
    "type": "object",
    "required": ["elements"],
    "properties": {
        "elements": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "element", "type"],
                "properties": {"type": {"enum": ["trivial", "parabolic", "loxodromic"]}},
            },
        }
    },
}

ORACLE = {
    "type": "object",
    "required": ["box", "solutions"],
    "properties": {"solutions": {"type": "array", "items": _assignment}},
}
