from __future__ import annotations

from typing import Any, Dict


def parse_value(v: str) -> Any:
    v = v.strip()
    # try int -> float -> bool -> str
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        pass
    if v.lower() in {"true", "false"}:
        return v.lower() == "true"
    return v


def parse_kv_params(items: list[str]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for item in items:
        if "=" not in item:
            raise ValueError(f"잘못된 파라미터 형식: {item}. key=value 형태여야 합니다.")
        k, v = item.split("=", 1)
        out[k.strip()] = parse_value(v)
    return out


def split_values(items: list[str]) -> list[Any]:
    """``["1,2", "3"]`` -> ``[1, 2, 3]``; repeated flags and comma lists both work."""
    return [parse_value(part) for item in items for part in item.split(",") if part.strip()]
