//! Plain-text graph configuration format.
//!
//! ```text
//! [mode.c0]
//! kind = cavity
//! frequency_ghz = 4.0
//! kappa_ghz = 0.001
//! gamma_a_ghz = 0.005
//! gamma_b_ghz = 0.005
//!
//! [coupling.0]
//! from = c0
//! to = m0
//! g_ghz = 0.15
//! phase_rad = 0.0
//! ```
//!
//! UTF-8 with LF line endings; `#` starts a comment. Modes keep file order
//! (which fixes matrix indices), couplings are ordered by their section
//! number. Bath rates beyond the two ports `a`/`b` are outside this format.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Coupling, CouplingGraph, Mode, ModeKind};

#[derive(Debug)]
enum Section {
    Mode(String),
    Coupling(usize),
}

fn unquote(value: &str) -> &str {
    let v = value.trim();
    if v.len() >= 2
        && ((v.starts_with('"') && v.ends_with('"')) || (v.starts_with('\'') && v.ends_with('\'')))
    {
        &v[1..v.len() - 1]
    } else {
        v
    }
}

fn parse_f64(value: &str, line: usize) -> Result<f64> {
    unquote(value).parse().map_err(|_| Error::ConfigParse {
        line,
        message: format!("bad float `{value}`"),
    })
}

/// Parse a coupling graph from config text.
pub fn parse_graph(text: &str) -> Result<CouplingGraph> {
    let mut modes: Vec<Mode> = Vec::new();
    let mut couplings: BTreeMap<usize, (usize, BTreeMap<String, String>)> = BTreeMap::new();
    let mut current: Option<(Section, usize, BTreeMap<String, String>)> = None;

    let mut finish = |section: Option<(Section, usize, BTreeMap<String, String>)>,
                      modes: &mut Vec<Mode>|
     -> Result<()> {
        let Some((section, start_line, keys)) = section else {
            return Ok(());
        };
        match section {
            Section::Mode(id) => {
                let required = |key: &str| -> Result<&String> {
                    keys.get(key).ok_or_else(|| Error::ConfigParse {
                        line: start_line,
                        message: format!("[mode.{id}] is missing `{key}`"),
                    })
                };
                let kind = match unquote(required("kind")?) {
                    "cavity" => ModeKind::Cavity,
                    "magnon" => ModeKind::Magnon,
                    other => {
                        return Err(Error::ConfigParse {
                            line: start_line,
                            message: format!(
                                "[mode.{id}] kind must be cavity or magnon, got `{other}`"
                            ),
                        })
                    }
                };
                let frequency = parse_f64(required("frequency_ghz")?, start_line)?;
                let mut mode = Mode::new(id.clone(), kind, frequency);
                if let Some(v) = keys.get("kappa_ghz") {
                    mode.intrinsic_loss = parse_f64(v, start_line)?;
                }
                for (key, label) in [("gamma_a_ghz", "a"), ("gamma_b_ghz", "b")] {
                    if let Some(v) = keys.get(key) {
                        let rate = parse_f64(v, start_line)?;
                        if rate != 0.0 {
                            mode.bath_couplings.insert(label.to_string(), rate);
                        }
                    }
                }
                for key in keys.keys() {
                    if !matches!(
                        key.as_str(),
                        "kind" | "frequency_ghz" | "kappa_ghz" | "gamma_a_ghz" | "gamma_b_ghz"
                    ) {
                        return Err(Error::ConfigParse {
                            line: start_line,
                            message: format!("[mode.{id}] has unknown key `{key}`"),
                        });
                    }
                }
                modes.push(mode);
            }
            Section::Coupling(n) => {
                for key in keys.keys() {
                    if !matches!(key.as_str(), "from" | "to" | "g_ghz" | "phase_rad") {
                        return Err(Error::ConfigParse {
                            line: start_line,
                            message: format!("[coupling.{n}] has unknown key `{key}`"),
                        });
                    }
                }
                if couplings.insert(n, (start_line, keys)).is_some() {
                    return Err(Error::ConfigParse {
                        line: start_line,
                        message: format!("duplicate section [coupling.{n}]"),
                    });
                }
            }
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            if !line.ends_with(']') {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: "unterminated section header".into(),
                });
            }
            let name = &line[1..line.len() - 1];
            let section = if let Some(id) = name.strip_prefix("mode.") {
                if id.is_empty() {
                    return Err(Error::ConfigParse {
                        line: line_no,
                        message: "empty mode id".into(),
                    });
                }
                Section::Mode(id.to_string())
            } else if let Some(n) = name.strip_prefix("coupling.") {
                let n = n.parse().map_err(|_| Error::ConfigParse {
                    line: line_no,
                    message: format!("bad coupling index `{n}`"),
                })?;
                Section::Coupling(n)
            } else {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: format!("unknown section `[{name}]`"),
                });
            };
            finish(current.take(), &mut modes)?;
            current = Some((section, line_no, BTreeMap::new()));
        } else if let Some((key, value)) = line.split_once('=') {
            let Some((_, _, keys)) = current.as_mut() else {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: "key outside any section".into(),
                });
            };
            let key = key.trim().to_string();
            if keys.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::ConfigParse {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
        } else {
            return Err(Error::ConfigParse {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            });
        }
    }
    finish(current.take(), &mut modes)?;

    let mut edge_list = Vec::with_capacity(couplings.len());
    for (n, (start_line, keys)) in couplings {
        let required = |key: &str| -> Result<&String> {
            keys.get(key).ok_or_else(|| Error::ConfigParse {
                line: start_line,
                message: format!("[coupling.{n}] is missing `{key}`"),
            })
        };
        let from = unquote(required("from")?).to_string();
        let to = unquote(required("to")?).to_string();
        let g = parse_f64(required("g_ghz")?, start_line)?;
        let phase = match keys.get("phase_rad") {
            Some(v) => parse_f64(v, start_line)?,
            None => 0.0,
        };
        edge_list.push(Coupling::new(from, to, g, phase));
    }

    CouplingGraph::new(modes, edge_list)
}

/// Serialize a graph to config text (LF endings, shortest round-trip floats).
pub fn write_graph(graph: &CouplingGraph) -> String {
    let mut out = String::new();
    for mode in graph.modes() {
        out.push_str(&format!("[mode.{}]\n", mode.id));
        out.push_str(&format!("kind = {}\n", mode.kind.as_str()));
        out.push_str(&format!("frequency_ghz = {}\n", mode.bare_frequency));
        out.push_str(&format!("kappa_ghz = {}\n", mode.intrinsic_loss));
        out.push_str(&format!("gamma_a_ghz = {}\n", mode.bath_rate("a")));
        out.push_str(&format!("gamma_b_ghz = {}\n", mode.bath_rate("b")));
        out.push('\n');
    }
    for (n, c) in graph.couplings().iter().enumerate() {
        out.push_str(&format!("[coupling.{n}]\n"));
        out.push_str(&format!("from = {}\n", c.from));
        out.push_str(&format!("to = {}\n", c.to));
        out.push_str(&format!("g_ghz = {}\n", c.strength));
        out.push_str(&format!("phase_rad = {}\n", c.phase));
        out.push('\n');
    }
    out
}
