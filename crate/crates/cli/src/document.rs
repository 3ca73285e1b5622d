//! Document model for `.flag` files: one named spec per file, printed in a
//! canonical line-oriented form that parses back to itself byte for byte.

use genflag_core::{
    BasisSpec, ChainSpec, Coloring, FormKind, GeneralizedFlagSpec, IndexSet, IsotropicFlagSpec,
    PicElement, PositionLabel, Scalar, TailRule, TailWeights, Vector,
};

#[derive(Debug, Clone, PartialEq)]
pub enum SpecDocument {
    Flag {
        name: String,
        spec: GeneralizedFlagSpec,
    },
    Chain {
        name: String,
        chain: ChainSpec,
    },
    Isotropic {
        name: String,
        spec: IsotropicFlagSpec,
    },
    Pic {
        name: String,
        element: PicElement,
    },
}

impl SpecDocument {
    pub fn name(&self) -> &str {
        match self {
            SpecDocument::Flag { name, .. }
            | SpecDocument::Chain { name, .. }
            | SpecDocument::Isotropic { name, .. }
            | SpecDocument::Pic { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SpecDocument::Flag { .. } => "flag",
            SpecDocument::Chain { .. } => "chain",
            SpecDocument::Isotropic { .. } => "isotropic-flag",
            SpecDocument::Pic { .. } => "pic-element",
        }
    }
}

pub fn form_name(kind: FormKind) -> &'static str {
    match kind {
        FormKind::B => "B",
        FormKind::C => "C",
        FormKind::D => "D",
    }
}

/// `e3` for slot 3, `e^3` for slot −3, `e0` for the center slot.
pub fn unit_name(slot: i64) -> String {
    if slot < 0 {
        format!("e^{}", -slot)
    } else {
        format!("e{slot}")
    }
}

pub fn vector_expr(v: &Vector) -> String {
    let mut terms = Vec::new();
    for slot in v.support() {
        let c = v.coeff(slot);
        let unit = unit_name(slot);
        terms.push(if c == Scalar::one() {
            unit
        } else if c == Scalar::from_int(-1) {
            format!("-{unit}")
        } else {
            format!("{c}*{unit}")
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Report form of a label: no interior space.
pub fn label_tight(a: &PositionLabel) -> String {
    format!("({},{})", a.tier, a.offset)
}

/// Document form of a label, as it appears after `->` in window lines.
fn label_spaced(a: &PositionLabel) -> String {
    format!("({}, {})", a.tier, a.offset)
}

fn int_list(xs: impl IntoIterator<Item = i64>) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn push_basis_lines(out: &mut String, basis: &BasisSpec) {
    for (slot, v) in basis.replaced() {
        out.push_str(&format!("basis replace {slot} = {}\n", vector_expr(v)));
    }
}

fn push_coloring_lines(out: &mut String, coloring: &Coloring) {
    for (i, a) in coloring.window.iter().enumerate() {
        out.push_str(&format!("window {} -> {}\n", i + 1, label_spaced(a)));
    }
    match &coloring.tail {
        TailRule::Affine { modulus, rules } => {
            out.push_str(&format!("tail affine mod {modulus}"));
            for (r, rule) in rules.iter().enumerate() {
                out.push_str(&format!(
                    " {r}: {}, {}, {}",
                    rule.tier, rule.slope, rule.intercept
                ));
            }
            out.push('\n');
        }
        TailRule::Dense { tier, reversed } => {
            out.push_str(&format!("tail dense {tier}"));
            if *reversed {
                out.push_str(" reversed");
            }
            out.push('\n');
        }
    }
}

fn push_member_line(out: &mut String, m: &IndexSet) {
    if m.residues.is_empty() {
        if m.explicit.is_empty() {
            out.push_str("member none\n");
        } else {
            out.push_str(&format!("member {}\n", int_list(m.explicit.iter().copied())));
        }
    } else if *m == IndexSet::all() {
        out.push_str("member all\n");
    } else {
        out.push_str(&format!(
            "member from {} mod {} residues {}",
            m.from,
            m.modulus,
            int_list(m.residues.iter().copied())
        ));
        if !m.explicit.is_empty() {
            out.push_str(&format!(" plus {}", int_list(m.explicit.iter().copied())));
        }
        out.push('\n');
    }
}

pub fn print_spec(doc: &SpecDocument) -> String {
    let mut out = String::new();
    match doc {
        SpecDocument::Flag { name, spec } => {
            out.push_str(&format!("flag {name}\n"));
            push_basis_lines(&mut out, &spec.basis);
            push_coloring_lines(&mut out, &spec.coloring);
        }
        SpecDocument::Chain { name, chain } => {
            out.push_str(&format!("chain {name}\n"));
            push_basis_lines(&mut out, &chain.basis);
            for m in &chain.members {
                push_member_line(&mut out, m);
            }
        }
        SpecDocument::Isotropic { name, spec } => {
            out.push_str(&format!("isotropic-flag {name}\n"));
            out.push_str(&format!("form {}\n", form_name(spec.form)));
            push_basis_lines(&mut out, &spec.basis);
            push_coloring_lines(&mut out, &spec.coloring.plus);
        }
        SpecDocument::Pic { name, element } => {
            out.push_str(&format!("pic-element {name}\n"));
            push_basis_lines(&mut out, &element.base.basis);
            push_coloring_lines(&mut out, &element.base.coloring);
            for (a, w) in &element.weights.exceptions {
                out.push_str(&format!("weight {} = {w}\n", label_spaced(a)));
            }
            match &element.weights.tail {
                TailWeights::Affine(ws) => {
                    out.push_str("weights affine");
                    for (r, (u, v)) in ws.iter().enumerate() {
                        out.push_str(&format!(" {r}: {u}, {v}"));
                    }
                    out.push('\n');
                }
                TailWeights::Constant(w) => {
                    out.push_str(&format!("weights constant {w}\n"));
                }
            }
        }
    }
    out
}
