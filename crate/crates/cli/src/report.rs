//! Subcommand dispatch and report formatting.
//!
//! Every successful report is a block of sorted `key: value` lines.  Exit
//! codes: 0 for answers (including negative booleans), 2 when the object
//! itself refuses the operation (incommensurable inputs, invisible
//! positions, obstructions), 1 for malformed input or misuse.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use genflag_core::{
    big_cell_coords, commensurable, dual, embed_step, embed_step_isotropic, find_covering_cell,
    flag_of_chain, is_flag, is_maximal, is_projective, is_projective_isotropic, is_very_ample,
    isotropic_gram_schmidt, kernel_check, kernel_check_isotropic, lift, mapping_element,
    mapping_element_isotropic, pic_presentation, pic_presentation_isotropic, restrict_pic,
    stabilizer_dim, truncate, truncate_isotropic, validate_isotropic, validate_spec, BasisSpec,
    CellMembership, Error as CoreError, FormKind, GeneralizedFlagSpec, Matrix, Vector,
};

use crate::document::{label_tight, print_spec, vector_expr, SpecDocument};
use crate::parser::{parse_spec, parse_vector_expr, CliError};

#[derive(Parser, Debug)]
#[command(name = "genflag", version, about = "Exact computations with generalized flags over Q")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reprint a document in normal form (chains become flags).
    Normalize { file: PathBuf },
    /// Does the coloring describe a maximal generalized flag?
    CheckMaximal { file: PathBuf },
    /// Does the coloring satisfy the flag condition (well-ordered tiers)?
    CheckFlag { file: PathBuf },
    /// Are two flags E-commensurable?  Exit 2 when they are not.
    Commensurable { left: PathBuf, right: PathBuf },
    /// Dimension sequence and step labels of the level-n truncation.
    Truncate {
        file: PathBuf,
        #[arg(long)]
        level: i64,
    },
    /// Embed the level-n truncation one level up and report the join.
    Embed {
        file: PathBuf,
        #[arg(long)]
        level: i64,
    },
    /// Truncate the first flag and lift the result along the second.
    Lift {
        finite: PathBuf,
        along: PathBuf,
        #[arg(long)]
        level: i64,
    },
    /// A determinant-one element carrying the first flag to the second.
    MapElement { left: PathBuf, right: PathBuf },
    /// Dimension of the level-n stabilizer of the flag.
    StabilizerDim {
        file: PathBuf,
        #[arg(long)]
        level: i64,
    },
    /// Coordinates of a flag inside the big cell centered at a basis.
    BigCell {
        element: PathBuf,
        flag: PathBuf,
        /// Flag document whose basis centers the cell (default: identity).
        #[arg(long)]
        center: Option<PathBuf>,
    },
    /// Find a basis whose big cell contains the first flag.
    Cover { element: PathBuf, flag: PathBuf },
    /// Check the isotropy and mirror conditions at a level.
    IsotropicCheck {
        file: PathBuf,
        #[arg(long)]
        level: i64,
    },
    /// Split vectors into hyperbolic pairs for a form.
    GramSchmidt {
        /// B, C, or D.
        #[arg(long)]
        form: String,
        /// Semicolon-separated vector expressions, e.g. "e1 + e^2; 2*e3".
        #[arg(long)]
        vectors: String,
    },
    /// Generators and relations of the Picard group.
    Picard { file: PathBuf },
    /// Restriction of a Picard element to the level-n truncation.
    Restrict {
        file: PathBuf,
        #[arg(long)]
        level: i64,
    },
    /// Compare restriction kernels with the predicted span at a level.
    KernelCheck {
        file: PathBuf,
        #[arg(long)]
        level: i64,
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
    /// Is the Picard element very ample?
    VeryAmple { file: PathBuf },
    /// Is the ind-variety of the flag projective?
    Projective { file: PathBuf },
    /// The dual flag (standard basis only).
    Dual { file: PathBuf },
}

#[derive(Debug)]
pub enum Failure {
    /// Malformed input or misuse: exit 1.
    Hard(String),
    /// Well-posed question whose object refuses the operation: exit 2.
    Refusal(String),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        let refusal = matches!(
            e,
            CoreError::Incommensurable
                | CoreError::LevelTooSmall { .. }
                | CoreError::TypeMismatch(_)
                | CoreError::PositionInvisible
                | CoreError::DegeneratePrefix
                | CoreError::FieldObstruction
                | CoreError::DeterminantObstruction
                | CoreError::NontrivialBasis
        );
        if refusal {
            Failure::Refusal(e.to_string())
        } else {
            Failure::Hard(e.to_string())
        }
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure::Hard(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn run(cli: &Cli) -> Outcome {
    match execute(&cli.command) {
        Ok((stdout, code)) => Outcome {
            stdout,
            stderr: String::new(),
            code,
        },
        Err(Failure::Refusal(m)) => Outcome {
            stdout: String::new(),
            stderr: format!("refused: {m}\n"),
            code: 2,
        },
        Err(Failure::Hard(m)) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {m}\n"),
            code: 1,
        },
    }
}

fn load(path: &Path) -> Result<SpecDocument, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Hard(format!("{}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| Failure::Hard(format!("{}: {e}", path.display())))
}

fn wrong_kind(doc: &SpecDocument, wanted: &str) -> Failure {
    Failure::Hard(format!(
        "{}: expected a {wanted} document, found {}",
        doc.name(),
        doc.kind()
    ))
}

fn flag_doc(doc: &SpecDocument) -> Result<(&str, &GeneralizedFlagSpec), Failure> {
    match doc {
        SpecDocument::Flag { name, spec } => Ok((name, spec)),
        _ => Err(wrong_kind(doc, "flag")),
    }
}

fn report(mut pairs: Vec<(&str, String)>) -> String {
    pairs.sort_by_key(|(k, _)| *k);
    let mut out = String::new();
    for (k, v) in pairs {
        out.push_str(&format!("{k}: {v}\n"));
    }
    out
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>, sep: &str) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

fn or_none(s: String) -> String {
    if s.is_empty() {
        "none".into()
    } else {
        s
    }
}

fn count_or_infinite(x: Option<usize>) -> String {
    x.map_or_else(|| "infinite".into(), |n| n.to_string())
}

fn block_string(m: &Matrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|r| join((0..m.cols()).map(|c| m.at(r, c)), ", "))
        .collect();
    rows.join("; ")
}

fn strip_identity_basis(b: &BasisSpec) -> BasisSpec {
    BasisSpec::with_replacements(
        b.replaced()
            .filter(|(slot, v)| **v != Vector::unit(*slot))
            .map(|(slot, v)| (slot, v.clone())),
    )
}

type Report = Result<(String, i32), Failure>;

fn execute(cmd: &Command) -> Report {
    match cmd {
        Command::Normalize { file } => {
            let doc = load(file)?;
            let out = match &doc {
                SpecDocument::Flag { name, spec } => {
                    let mut spec = validate_spec(spec)?.spec;
                    spec.basis = strip_identity_basis(&spec.basis);
                    print_spec(&SpecDocument::Flag {
                        name: name.clone(),
                        spec,
                    })
                }
                SpecDocument::Chain { name, chain } => {
                    let spec = flag_of_chain(chain)?;
                    print_spec(&SpecDocument::Flag {
                        name: name.clone(),
                        spec,
                    })
                }
                SpecDocument::Isotropic { name, spec } => {
                    let mut spec = spec.clone();
                    spec.basis = strip_identity_basis(&spec.basis);
                    spec.coloring.plus.canonicalize();
                    spec.coloring.minus = spec.coloring.plus.mirror();
                    print_spec(&SpecDocument::Isotropic {
                        name: name.clone(),
                        spec,
                    })
                }
                SpecDocument::Pic { .. } => print_spec(&doc),
            };
            Ok((out, 0))
        }
        Command::CheckMaximal { file } => {
            let doc = load(file)?;
            let (_, spec) = flag_doc(&doc)?;
            let canonical = validate_spec(spec)?.spec;
            Ok((report(vec![("maximal", is_maximal(&canonical).to_string())]), 0))
        }
        Command::CheckFlag { file } => {
            let doc = load(file)?;
            let (_, spec) = flag_doc(&doc)?;
            let canonical = validate_spec(spec)?.spec;
            Ok((report(vec![("flag", is_flag(&canonical).to_string())]), 0))
        }
        Command::Commensurable { left, right } => {
            let a = load(left)?;
            let b = load(right)?;
            let (_, s1) = flag_doc(&a)?;
            let (_, s2) = flag_doc(&b)?;
            let yes = commensurable(s1, s2)?.is_commensurable();
            Ok((format!("commensurable: {yes}\n"), if yes { 0 } else { 2 }))
        }
        Command::Truncate { file, level } => {
            let doc = load(file)?;
            let t = match &doc {
                SpecDocument::Flag { spec, .. } => truncate(spec, *level)?,
                SpecDocument::Isotropic { spec, .. } => truncate_isotropic(spec, *level)?,
                _ => return Err(wrong_kind(&doc, "flag or isotropic-flag")),
            };
            Ok((
                report(vec![
                    ("d", join(t.dims(), ",")),
                    ("labels", or_none(join(t.labels.iter().map(label_tight), " "))),
                ]),
                0,
            ))
        }
        Command::Embed { file, level } => {
            let doc = load(file)?;
            let out = match &doc {
                SpecDocument::Flag { spec, .. } => {
                    let f = truncate(spec, *level)?;
                    let emb = embed_step(&f, spec)?;
                    report(vec![
                        ("class-added", emb.class_added.to_string()),
                        ("d", join(emb.flag.dims(), ",")),
                        ("join", emb.join_position.to_string()),
                    ])
                }
                SpecDocument::Isotropic { spec, .. } => {
                    let f = truncate_isotropic(spec, *level)?;
                    let g = embed_step_isotropic(&f, spec)?;
                    report(vec![("d", join(g.dims(), ","))])
                }
                _ => return Err(wrong_kind(&doc, "flag or isotropic-flag")),
            };
            Ok((out, 0))
        }
        Command::Lift {
            finite,
            along,
            level,
        } => {
            let a = load(finite)?;
            let b = load(along)?;
            let (name, s1) = flag_doc(&a)?;
            let (_, s2) = flag_doc(&b)?;
            let f = truncate(s1, *level)?;
            let mut lifted = lift(&f, s2)?;
            lifted.basis = strip_identity_basis(&lifted.basis);
            Ok((
                print_spec(&SpecDocument::Flag {
                    name: name.to_string(),
                    spec: lifted,
                }),
                0,
            ))
        }
        Command::MapElement { left, right } => {
            let a = load(left)?;
            let b = load(right)?;
            let out = match (&a, &b) {
                (SpecDocument::Flag { spec: s1, .. }, SpecDocument::Flag { spec: s2, .. }) => {
                    let g = mapping_element(s1, s2)?;
                    report(vec![
                        ("block", block_string(&g.block)),
                        ("det", g.det()?.to_string()),
                        ("window", g.window.to_string()),
                    ])
                }
                (
                    SpecDocument::Isotropic { spec: s1, .. },
                    SpecDocument::Isotropic { spec: s2, .. },
                ) => {
                    let g = mapping_element_isotropic(s1, s2)?;
                    report(vec![
                        ("block", block_string(&g.block)),
                        ("det", g.det()?.to_string()),
                        ("slots", join(g.slots.iter(), ",")),
                    ])
                }
                _ => {
                    return Err(Failure::Hard(
                        "map-element needs two flag documents or two isotropic-flag documents"
                            .into(),
                    ))
                }
            };
            Ok((out, 0))
        }
        Command::StabilizerDim { file, level } => {
            let doc = load(file)?;
            let (_, spec) = flag_doc(&doc)?;
            Ok((
                report(vec![("dim", stabilizer_dim(spec, *level)?.to_string())]),
                0,
            ))
        }
        Command::BigCell {
            element,
            flag,
            center,
        } => {
            let gdoc = load(element)?;
            let fdoc = load(flag)?;
            let (_, g) = flag_doc(&gdoc)?;
            let (_, f) = flag_doc(&fdoc)?;
            let l = match center {
                Some(path) => {
                    let cdoc = load(path)?;
                    let (_, c) = flag_doc(&cdoc)?;
                    c.basis.clone()
                }
                None => BasisSpec::identity(),
            };
            match big_cell_coords(g, &l, f)? {
                CellMembership::InCell(coords) => {
                    let maps = coords.maps.iter().map(|m| {
                        let entries =
                            join(m.entries.iter().map(|(i, o, c)| format!("({i},{o},{c})")), " ");
                        format!("{}: {entries}", label_tight(&m.position))
                    });
                    Ok((
                        report(vec![
                            ("in-cell", "true".into()),
                            ("maps", or_none(join(maps, "; "))),
                        ]),
                        0,
                    ))
                }
                CellMembership::NotInCell { position, excess } => Ok((
                    report(vec![
                        ("excess", excess.to_string()),
                        ("in-cell", "false".into()),
                        ("position", label_tight(&position)),
                    ]),
                    2,
                )),
            }
        }
        Command::Cover { element, flag } => {
            let gdoc = load(element)?;
            let fdoc = load(flag)?;
            let (name, g) = flag_doc(&gdoc)?;
            let (_, f) = flag_doc(&fdoc)?;
            let l = find_covering_cell(g, f)?;
            let spec = GeneralizedFlagSpec::new(l, validate_spec(f)?.spec.coloring);
            Ok((
                print_spec(&SpecDocument::Flag {
                    name: format!("{name}-COVER"),
                    spec,
                }),
                0,
            ))
        }
        Command::IsotropicCheck { file, level } => {
            let doc = load(file)?;
            let SpecDocument::Isotropic { spec, .. } = &doc else {
                return Err(wrong_kind(&doc, "isotropic-flag"));
            };
            let check = validate_isotropic(spec, *level)?;
            let mut pairs = vec![
                ("f-tau-dim", check.f_tau_dim.to_string()),
                ("ok", check.ok.to_string()),
            ];
            if let Some(failing) = &check.failing {
                pairs.push(("failing", failing.clone()));
            }
            Ok((report(pairs), 0))
        }
        Command::GramSchmidt { form, vectors } => {
            let kind = match form.as_str() {
                "B" => FormKind::B,
                "C" => FormKind::C,
                "D" => FormKind::D,
                other => return Err(Failure::Hard(format!("unknown form `{other}`"))),
            };
            let mut gs = Vec::new();
            for part in vectors.split(';') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                gs.push(
                    parse_vector_expr(part)
                        .map_err(|e| Failure::Hard(format!("--vectors: {e}")))?,
                );
            }
            let (us, vs) = isotropic_gram_schmidt(&gs, kind)?;
            Ok((
                report(vec![
                    ("pairs", us.len().to_string()),
                    ("us", or_none(join(us.iter().map(vector_expr), "; "))),
                    ("vs", or_none(join(vs.iter().map(vector_expr), "; "))),
                ]),
                0,
            ))
        }
        Command::Picard { file } => {
            let doc = load(file)?;
            let pres = match &doc {
                SpecDocument::Flag { spec, .. } => pic_presentation(spec)?,
                SpecDocument::Isotropic { spec, .. } => pic_presentation_isotropic(spec)?,
                _ => return Err(wrong_kind(&doc, "flag or isotropic-flag")),
            };
            Ok((
                report(vec![
                    ("diagonal-relation", pres.diagonal_relation.to_string()),
                    ("free-rank", count_or_infinite(pres.free_rank)),
                    ("generators", count_or_infinite(pres.generators)),
                    ("sample", or_none(join(pres.sample.iter().map(label_tight), " "))),
                ]),
                0,
            ))
        }
        Command::Restrict { file, level } => {
            let doc = load(file)?;
            let SpecDocument::Pic { element, .. } = &doc else {
                return Err(wrong_kind(&doc, "pic-element"));
            };
            let coords = restrict_pic(element, *level)?;
            Ok((report(vec![("coords", or_none(join(coords, ",")))]), 0))
        }
        Command::KernelCheck { file, level, bound } => {
            let doc = load(file)?;
            let matches = match &doc {
                SpecDocument::Flag { spec, .. } => kernel_check(spec, *level, *bound)?,
                SpecDocument::Isotropic { spec, .. } => {
                    kernel_check_isotropic(spec, *level, *bound)?
                }
                _ => return Err(wrong_kind(&doc, "flag or isotropic-flag")),
            };
            Ok((report(vec![("kernel-matches", matches.to_string())]), 0))
        }
        Command::VeryAmple { file } => {
            let doc = load(file)?;
            let SpecDocument::Pic { element, .. } = &doc else {
                return Err(wrong_kind(&doc, "pic-element"));
            };
            Ok((
                report(vec![("very-ample", is_very_ample(element)?.to_string())]),
                0,
            ))
        }
        Command::Projective { file } => {
            let doc = load(file)?;
            let answer = match &doc {
                SpecDocument::Flag { spec, .. } => is_projective(spec)?,
                SpecDocument::Isotropic { spec, .. } => is_projective_isotropic(spec)?,
                _ => return Err(wrong_kind(&doc, "flag or isotropic-flag")),
            };
            Ok((report(vec![("projective", answer.to_string())]), 0))
        }
        Command::Dual { file } => {
            let doc = load(file)?;
            let (name, spec) = flag_doc(&doc)?;
            let d = dual(spec)?;
            Ok((
                print_spec(&SpecDocument::Flag {
                    name: name.to_string(),
                    spec: d,
                }),
                0,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_doc(name: &str, text: &str) -> PathBuf {
        let path = std::env::temp_dir().join(format!("genflag-{}-{name}", std::process::id()));
        fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn refusals_and_hard_failures_split_by_error_kind() {
        assert!(matches!(Failure::from(CoreError::Incommensurable), Failure::Refusal(_)));
        assert!(matches!(Failure::from(CoreError::NontrivialBasis), Failure::Refusal(_)));
        assert!(matches!(
            Failure::from(CoreError::LevelTooSmall { required: 3, got: 1 }),
            Failure::Refusal(_)
        ));
        assert!(matches!(Failure::from(CoreError::NotAChain), Failure::Hard(_)));
        assert!(matches!(Failure::from(CoreError::SingularBasis), Failure::Hard(_)));
        assert!(matches!(
            Failure::from(CliError::Semantic("bad".into())),
            Failure::Hard(_)
        ));
    }

    #[test]
    fn reports_sort_their_keys() {
        let r = report(vec![("zeta", "1".into()), ("alpha", "2".into()), ("mid", "3".into())]);
        assert_eq!(r, "alpha: 2\nmid: 3\nzeta: 1\n");
    }

    #[test]
    fn run_routes_success_refusal_and_misuse() {
        let asc = temp_doc("asc.flag", "flag ASC\ntail affine mod 1 0: 0, 1, 0\n");
        let out = run(&Cli {
            command: Command::Projective { file: asc.clone() },
        });
        assert_eq!((out.stdout.as_str(), out.code), ("projective: true\n", 0));
        assert!(out.stderr.is_empty());

        // Dual refuses modified bases: exit 2 via stderr.
        let mix = temp_doc(
            "mix.flag",
            "flag M\nbasis replace 1 = 2*e1\ntail affine mod 1 0: 0, 1, 0\n",
        );
        let out = run(&Cli {
            command: Command::Dual { file: mix.clone() },
        });
        assert_eq!(out.code, 2);
        assert!(out.stderr.starts_with("refused: "));
        assert!(out.stdout.is_empty());

        let out = run(&Cli {
            command: Command::Projective {
                file: PathBuf::from("/definitely/missing.flag"),
            },
        });
        assert_eq!(out.code, 1);
        assert!(out.stderr.starts_with("error: "));

        fs::remove_file(asc).ok();
        fs::remove_file(mix).ok();
    }

    #[test]
    fn wrong_document_kind_is_misuse_not_refusal() {
        let chain = temp_doc("chain.flag", "chain C\nmember all\n");
        let out = run(&Cli {
            command: Command::CheckFlag { file: chain.clone() },
        });
        assert_eq!(out.code, 1);
        assert!(out.stderr.contains("expected a flag document"));
        fs::remove_file(chain).ok();
    }

    #[test]
    fn level_refusals_surface_the_requirement() {
        let gr2 = temp_doc(
            "gr2.flag",
            "flag G\nwindow 1 -> (0, 1)\nwindow 2 -> (0, 1)\ntail affine mod 1 0: 0, 0, 2\n",
        );
        let out = run(&Cli {
            command: Command::Truncate {
                file: gr2.clone(),
                level: 1,
            },
        });
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("too small"));
        fs::remove_file(gr2).ok();
    }
}
