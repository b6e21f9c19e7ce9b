//! Minimal TSPLIB reader: coordinates from `NODE_COORD_SECTION` or
//! `DISPLAY_DATA_SECTION`. Explicit edge weights are skipped.

use thiserror::Error;

use crate::geometry::Point2;

#[derive(Debug, Error, PartialEq)]
pub enum TsplibError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("DIMENSION is {expected} but {found} coordinate rows were read")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no NODE_COORD_SECTION or DISPLAY_DATA_SECTION found")]
    MissingCoordinates,
}

/// Bundled `bays29` coordinates (29 cities in Bavaria).
pub const BAYS29: &str = include_str!("../data/bays29.tsp");

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Header,
    Coords,
    Display,
    Skip,
}

fn is_keyword(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
}

/// Parses a TSPLIB document into an ordered list of coordinates.
pub fn load_tsplib(text: &str) -> Result<Vec<Point2<f64>>, TsplibError> {
    let mut dimension: Option<usize> = None;
    let mut coords = Vec::new();
    let mut display = Vec::new();
    let mut seen_coords = false;
    let mut seen_display = false;
    let mut section = Section::Header;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if is_keyword(line) {
            let (key, value) = match line.split_once(':') {
                Some((k, v)) => (k.trim(), Some(v.trim())),
                None => (line, None),
            };
            match key {
                "EOF" => break,
                "NODE_COORD_SECTION" => {
                    seen_coords = true;
                    section = Section::Coords;
                }
                "DISPLAY_DATA_SECTION" => {
                    seen_display = true;
                    section = Section::Display;
                }
                k if k.ends_with("_SECTION") => section = Section::Skip,
                "DIMENSION" => {
                    let v = value.unwrap_or("");
                    dimension = Some(v.parse().map_err(|_| TsplibError::Parse {
                        line: line_no,
                        message: format!("invalid DIMENSION value {v:?}"),
                    })?);
                    section = Section::Header;
                }
                _ => section = Section::Header,
            }
            continue;
        }
        let target = match section {
            Section::Coords => &mut coords,
            Section::Display => &mut display,
            Section::Skip => continue,
            Section::Header => {
                return Err(TsplibError::Parse {
                    line: line_no,
                    message: format!("unexpected data outside a section: {line:?}"),
                })
            }
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(TsplibError::Parse {
                line: line_no,
                message: format!("expected `index x y`, got {line:?}"),
            });
        }
        let parse = |s: &str| -> Result<f64, TsplibError> {
            s.parse::<f64>().map_err(|_| TsplibError::Parse {
                line: line_no,
                message: format!("invalid number {s:?}"),
            })
        };
        fields[0].parse::<usize>().map_err(|_| TsplibError::Parse {
            line: line_no,
            message: format!("invalid node index {:?}", fields[0]),
        })?;
        target.push(Point2::new(parse(fields[1])?, parse(fields[2])?));
    }

    let points = if seen_coords {
        coords
    } else if seen_display {
        display
    } else if dimension == Some(0) {
        Vec::new()
    } else {
        return Err(TsplibError::MissingCoordinates);
    };
    if let Some(expected) = dimension {
        if expected != points.len() {
            return Err(TsplibError::DimensionMismatch {
                expected,
                found: points.len(),
            });
        }
    }
    Ok(points)
}
