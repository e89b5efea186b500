//! Random well-formed programs for property tests.

#![allow(dead_code)]

use proptest::prelude::*;

#[derive(Debug, Clone)]
pub enum Shape {
    Access {
        array: u8,
        offset: i64,
        form: u8,
    },
    Loop {
        extra: i64,
        step: i64,
        body: Box<Shape>,
    },
    Block(Vec<Shape>),
    If {
        shift: i64,
        then: Box<Shape>,
        otherwise: Option<Box<Shape>>,
    },
}

pub fn shape() -> impl Strategy<Value = Shape> {
    let leaf = (0u8..3, -2i64..3, 0u8..4).prop_map(|(array, offset, form)| Shape::Access { array, offset, form });
    leaf.prop_recursive(4, 20, 3, |inner| {
        prop_oneof![
            (0i64..3, 1i64..3, inner.clone()).prop_map(|(extra, step, b)| Shape::Loop {
                extra,
                step,
                body: Box::new(b),
            }),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Shape::Block),
            (-2i64..3, inner.clone(), prop::option::of(inner)).prop_map(|(shift, t, e)| Shape::If {
                shift,
                then: Box::new(t),
                otherwise: e.map(Box::new),
            }),
        ]
    })
}

/// Source text in the lenient form: `n` is the only parameter and arrays
/// are implicit. Subscripts stay non-negative for `n >= 0`.
pub fn render(s: &Shape) -> String {
    let mut out = String::new();
    emit(s, 0, &mut out);
    out
}

fn var(depth: usize, k: usize) -> String {
    format!("v{}", k % depth)
}

fn emit(s: &Shape, depth: usize, out: &mut String) {
    match s {
        Shape::Access { array, offset, form } => {
            let base = if depth == 0 {
                "n".to_string()
            } else {
                var(depth, (*offset + 2) as usize)
            };
            let off = offset.abs();
            let sub = match form {
                0 => format!("{base} + {off}"),
                1 => format!("2 * {base} + {off}"),
                2 => format!("floor(({base} + {off}) / 2)"),
                _ => format!("ceil({base} / 3) + n"),
            };
            match array {
                0 => out.push_str(&format!("access A[{sub}];\n")),
                1 => out.push_str(&format!("access B[{sub}, {off}];\n")),
                _ => out.push_str(&format!("access C[{sub}];\n")),
            }
        }
        Shape::Loop { extra, step, body } => {
            let lower = if depth == 0 {
                "0".to_string()
            } else {
                format!("v{}", depth - 1)
            };
            out.push_str(&format!("for v{depth} = {lower} to n + {extra} step {step} {{\n"));
            emit(body, depth + 1, out);
            out.push_str("}\n");
        }
        Shape::Block(items) => {
            out.push_str("{\n");
            for i in items {
                emit(i, depth, out);
            }
            out.push_str("}\n");
        }
        Shape::If { shift, then, otherwise } => {
            let lhs = if depth == 0 {
                "n".to_string()
            } else {
                format!("v{}", depth - 1)
            };
            out.push_str(&format!("if ({lhs} + {shift} < n && {lhs} >= 0 || {lhs} == 1) {{\n"));
            emit(then, depth, out);
            out.push('}');
            if let Some(e) = otherwise {
                out.push_str(" else {\n");
                emit(e, depth, out);
                out.push('}');
            }
            out.push('\n');
        }
    }
}
