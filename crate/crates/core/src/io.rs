//! JSON file formats for modules and decomposition reports.
//!
//! A module file looks like
//!
//! ```json
//! {"prime": 32003, "cells": [2, 2, 2],
//!  "dims": [[[0, 0], [0, 1]], [[0, 1], [1, 2]]],
//!  "maps": {"axis1": [{"at": [0, 0, 0], "matrix": []}, ...], "axis2": [...], "axis3": [...]}}
//! ```
//!
//! Coordinates are 0-based and `dims` is indexed `[t1][t2][t3]`. Every step
//! map, including empty ones, must appear exactly once; entries may be any
//! integers and are reduced modulo the prime.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::blocks::Block;
use crate::decomposer::{DecompositionReport, Entry};
use crate::error::{Error, Result};
use crate::grid::{Grid, GridPoint};
use crate::linalg::{Field, Matrix};
use crate::module::GridModule;

const AXIS_KEYS: [&str; 3] = ["axis1", "axis2", "axis3"];

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Serializes a module; maps are sorted by `at`, one per line.
pub fn module_to_json(m: &GridModule) -> String {
    let g = m.grid();
    let [m1, m2, m3] = g.cells();
    let dims = join((0..m1).map(|i| {
        format!(
            "[{}]",
            join(
                (0..m2)
                    .map(|j| format!("[{}]", join((0..m3).map(|k| m.dim(GridPoint([i, j, k]))))))
            )
        )
    }));
    let mut out = String::new();
    writeln!(out, "{{").unwrap();
    writeln!(out, "  \"prime\": {},", m.field().prime()).unwrap();
    writeln!(out, "  \"cells\": [{}],", join(g.cells())).unwrap();
    writeln!(out, "  \"dims\": [{dims}],").unwrap();
    writeln!(out, "  \"maps\": {{").unwrap();
    for (axis, key) in AXIS_KEYS.iter().enumerate() {
        let lines: Vec<String> = g
            .points()
            .filter_map(|t| m.step(axis, t).map(|s| (t, s)))
            .map(|(t, s)| {
                let rows = join(s.row_iter().map(|r| format!("[{}]", join(r.iter()))));
                format!("      {{\"at\": [{}], \"matrix\": [{rows}]}}", join(t.0))
            })
            .collect();
        let sep = if axis < 2 { "," } else { "" };
        if lines.is_empty() {
            writeln!(out, "    \"{key}\": []{sep}").unwrap();
        } else {
            writeln!(out, "    \"{key}\": [\n{}\n    ]{sep}", lines.join(",\n")).unwrap();
        }
    }
    writeln!(out, "  }}").unwrap();
    writeln!(out, "}}").unwrap();
    out
}

fn parse_json(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        Error::format(
            format!("{what}: line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

fn field_of<'a>(obj: &'a Value, key: &str, loc: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::format(loc, format!("missing key \"{key}\"")))
}

fn as_usize(v: &Value, loc: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::format(loc, format!("expected a non-negative integer, found {v}")))
}

fn as_array<'a>(v: &'a Value, loc: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::format(loc, format!("expected an array, found {v}")))
}

fn as_triple(v: &Value, loc: &str) -> Result<[usize; 3]> {
    let arr = as_array(v, loc)?;
    if arr.len() != 3 {
        return Err(Error::format(
            loc,
            format!("expected 3 entries, found {}", arr.len()),
        ));
    }
    Ok([
        as_usize(&arr[0], &format!("{loc}[0]"))?,
        as_usize(&arr[1], &format!("{loc}[1]"))?,
        as_usize(&arr[2], &format!("{loc}[2]"))?,
    ])
}

fn reduce(field: Field, v: &Value, loc: &str) -> Result<u32> {
    if let Some(x) = v.as_i64() {
        return Ok(field.reduce(x));
    }
    if let Some(x) = v.as_u64() {
        return Ok((x % field.prime() as u64) as u32);
    }
    Err(Error::format(
        loc,
        format!("expected an integer, found {v}"),
    ))
}

/// Parses a module file. Shapes are checked here; commutativity is left to
/// [`GridModule::validate`].
pub fn module_from_json(text: &str) -> Result<GridModule> {
    let doc = parse_json(text, "module")?;
    if !doc.is_object() {
        return Err(Error::format("$", "expected an object"));
    }
    let prime = field_of(&doc, "prime", "$")?
        .as_u64()
        .ok_or_else(|| Error::format("prime", "expected a positive integer"))?;
    let field = Field::new(prime).map_err(|e| Error::format("prime", e.to_string()))?;
    let cells = as_triple(field_of(&doc, "cells", "$")?, "cells")?;
    let grid = Grid::new(cells).map_err(|e| Error::format("cells", e.to_string()))?;

    let dims_v = as_array(field_of(&doc, "dims", "$")?, "dims")?;
    let mut dims = vec![0; grid.len()];
    if dims_v.len() != cells[0] {
        return Err(Error::format(
            "dims",
            format!("expected {} planes", cells[0]),
        ));
    }
    for (i, plane) in dims_v.iter().enumerate() {
        let loc = format!("dims[{i}]");
        let plane = as_array(plane, &loc)?;
        if plane.len() != cells[1] {
            return Err(Error::format(&loc, format!("expected {} rows", cells[1])));
        }
        for (j, row) in plane.iter().enumerate() {
            let loc = format!("dims[{i}][{j}]");
            let row = as_array(row, &loc)?;
            if row.len() != cells[2] {
                return Err(Error::format(
                    &loc,
                    format!("expected {} entries", cells[2]),
                ));
            }
            for (k, d) in row.iter().enumerate() {
                dims[grid.index(GridPoint([i, j, k]))] =
                    as_usize(d, &format!("dims[{i}][{j}][{k}]"))?;
            }
        }
    }

    let maps = field_of(&doc, "maps", "$")?;
    let mut steps: [Vec<Option<Matrix>>; 3] = Default::default();
    for (axis, key) in AXIS_KEYS.iter().enumerate() {
        let list = as_array(field_of(maps, key, "maps")?, &format!("maps.{key}"))?;
        let mut slots: Vec<Option<Matrix>> = vec![None; grid.len()];
        for (n, item) in list.iter().enumerate() {
            let loc = format!("maps.{key}[{n}]");
            let at = as_triple(field_of(item, "at", &loc)?, &format!("{loc}.at"))?;
            let t = GridPoint(at);
            if !grid.contains(t) || !grid.has_step(axis, t) {
                return Err(Error::format(
                    format!("{loc}.at"),
                    format!("no step along axis {} starts at {:?}", axis + 1, at),
                ));
            }
            if slots[grid.index(t)].is_some() {
                return Err(Error::format(
                    format!("{loc}.at"),
                    format!("duplicate map at {at:?}"),
                ));
            }
            let (rows, cols) = (dims[grid.index(t.step(axis))], dims[grid.index(t)]);
            let mloc = format!("{loc}.matrix");
            let rows_v = as_array(field_of(item, "matrix", &loc)?, &mloc)?;
            if rows_v.len() != rows {
                return Err(Error::format(
                    &mloc,
                    format!("expected {rows} rows, found {}", rows_v.len()),
                ));
            }
            let mut data = Vec::with_capacity(rows * cols);
            for (r, row) in rows_v.iter().enumerate() {
                let rloc = format!("{mloc}[{r}]");
                let row = as_array(row, &rloc)?;
                if row.len() != cols {
                    return Err(Error::format(
                        &rloc,
                        format!("expected {cols} entries, found {}", row.len()),
                    ));
                }
                for (c, x) in row.iter().enumerate() {
                    data.push(reduce(field, x, &format!("{rloc}[{c}]"))?);
                }
            }
            slots[grid.index(t)] = Some(Matrix::from_vec(field, rows, cols, data)?);
        }
        for t in grid.points() {
            if grid.has_step(axis, t) && slots[grid.index(t)].is_none() {
                return Err(Error::format(
                    format!("maps.{key}"),
                    format!("missing map at {:?}", t.0),
                ));
            }
        }
        steps[axis] = slots;
    }
    GridModule::from_parts(field, grid, dims, steps)
}

pub fn read_module(path: &Path) -> Result<GridModule> {
    let text = std::fs::read_to_string(path)?;
    module_from_json(&text).map_err(|e| match e {
        Error::Format { location, message } => Error::Format {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}

pub fn write_module(path: &Path, m: &GridModule) -> Result<()> {
    std::fs::write(path, module_to_json(m))?;
    Ok(())
}

pub fn report_to_json(r: &DecompositionReport) -> String {
    serde_json::to_string_pretty(r).expect("reports serialize") + "\n"
}

pub fn report_from_json(text: &str) -> Result<DecompositionReport> {
    serde_json::from_str(text).map_err(|e| {
        Error::format(
            format!("report: line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

/// The multiset written next to generated block sums.
pub fn multiset_to_json(multiset: &[(Block, usize)]) -> String {
    let entries: Vec<Entry> = multiset
        .iter()
        .map(|&(block, multiplicity)| Entry {
            block,
            multiplicity,
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({ "entries": entries })).expect("serializable")
        + "\n"
}

pub fn multiset_from_json(text: &str) -> Result<Vec<(Block, usize)>> {
    #[derive(serde::Deserialize)]
    struct Doc {
        entries: Vec<Entry>,
    }
    let doc: Doc = serde_json::from_str(text).map_err(|e| {
        Error::format(
            format!("entries: line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    Ok(doc
        .entries
        .into_iter()
        .map(|e| (e.block, e.multiplicity))
        .collect())
}
