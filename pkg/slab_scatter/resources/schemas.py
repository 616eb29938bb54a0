"""JSON schemas for potential specifications and pulse configurations."""

from typing import Any, Dict

PROFILE_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["kind"],
    "oneOf": [
        {
            "properties": {"kind": {"const": "const"}, "value": {"type": "number"}},
            "required": ["kind", "value"],
        },
        {
            "properties": {
                "kind": {"const": "poly"},
                "coefficients": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            },
            "required": ["kind", "coefficients"],
        },
        {
            "properties": {
                "kind": {"const": "table"},
                "xs": {"type": "array", "items": {"type": "number"}, "minItems": 2},
                "values": {"type": "array", "items": {"type": "number"}, "minItems": 2},
            },
            "required": ["kind", "xs", "values"],
        },
    ],
}

POTENTIAL_SPEC_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "PotentialSpec",
    "type": "object",
    "required": ["period"],
    "additionalProperties": False,
    "properties": {
        "period": {"type": "number", "exclusiveMinimum": 0},
        "amplitude": {"type": "number"},
        "deltas": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["offset", "strength"],
                "additionalProperties": False,
                "properties": {
                    "offset": {"type": "number", "minimum": 0},
                    "strength": {"type": "number"},
                },
            },
        },
        "smooth": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["lo", "hi", "profile"],
                "additionalProperties": False,
                "properties": {
                    "lo": {"type": "number"},
                    "hi": {"type": "number"},
                    "profile": PROFILE_SCHEMA,
                },
            },
        },
    },
}

PULSE_CONFIG_SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "PulseConfig",
    "type": "object",
    "required": ["amplitude", "periods"],
    "additionalProperties": False,
    "properties": {
        "band_index": {"type": "integer", "minimum": 1},
        "theta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 4},
        "amplitude": {"type": "number", "minimum": 0},
        "period": {"type": "number", "exclusiveMinimum": 0},
        "periods": {"type": "integer", "minimum": 1},
        "width": {"type": "number", "exclusiveMinimum": 0},
        "cells_per_period": {"type": "integer", "minimum": 2},
        "margin": {"type": "number", "minimum": 0},
        "t_end": {"type": "number", "exclusiveMinimum": 0},
        "scale": {"type": "number"},
        "record_every": {"type": "integer", "minimum": 1},
    },
}
