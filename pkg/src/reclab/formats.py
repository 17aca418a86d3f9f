"""Text and JSON forms of tower elements."""

from __future__ import annotations

import ast
import json

from .errors import ParseError


def element_to_text(a) -> str:
    """Integer-coefficient polynomial in ``P`` and ``u`` (centered digits)."""
    mod = a.params.p**a.precision
    terms = []
    for i in range(a.params.e):
        for j in range(a.params.d):
            c = int(a.coeffs[i, j])
            if c > mod // 2:
                c -= mod
            if not c:
                continue
            mono = "*".join(
                x for x in (("P" if i == 1 else f"P^{i}") if i else "", ("u" if j == 1 else f"u^{j}") if j else "") if x
            )
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append(f"-{mono}")
            else:
                terms.append(f"{c}*{mono}")
    body = " + ".join(terms).replace("+ -", "- ") or "0"
    if a.pi_shift:
        return f"P^({a.pi_shift})*({body})"
    return body


def parse_element(params, text: str, precision=None):
    """Parse ``P + 2*P*u^2``-style expressions (``^`` and ``**`` both mean power)."""
    prec = params.N if precision is None else precision
    try:
        # ``^`` must bind like ``**``, not like Python's xor
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return params.scalar(node.value, prec)
        if isinstance(node, ast.Name):
            if node.id == "P":
                return params.pi(prec)
            if node.id == "u":
                return params.u(prec)
            raise ParseError(f"unknown symbol {node.id!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = node.right
                if isinstance(exp, ast.UnaryOp) and isinstance(exp.op, ast.USub):
                    raise ParseError("negative exponents are not allowed")
                if not (isinstance(exp, ast.Constant) and isinstance(exp.value, int)):
                    raise ParseError("exponent must be a non-negative integer literal")
                return ev(node.left) ** exp.value
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
        raise ParseError(f"unsupported syntax in {text!r}")

    return ev(tree)


def element_to_json_obj(a) -> dict:
    return {
        "pi_shift": a.pi_shift,
        "precision": a.precision,
        "coeffs": [[int(c) for c in row] for row in a.coeffs],
    }


def element_from_json_obj(params, obj: dict):
    from .tower import TowerElement

    try:
        coeffs = obj["coeffs"]
        shift = int(obj.get("pi_shift", 0))
        prec = int(obj.get("precision", params.N))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad element JSON: {exc}") from None
    if any(not isinstance(c, int) for row in coeffs for c in row):
        raise ParseError("coefficients must be integers")
    return TowerElement(params, coeffs, shift, prec)


def element_to_json(a) -> str:
    return json.dumps(element_to_json_obj(a), separators=(",", ":"))


def element_from_json(params, text: str):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from None
    return element_from_json_obj(params, obj)
