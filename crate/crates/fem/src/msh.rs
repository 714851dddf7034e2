//! ASCII mesh-interchange reader and writer with version-2.2 style sections
//! (`$MeshFormat`, `$PhysicalNames`, `$Nodes`, `$Elements`).
//!
//! Accepted element types:
//! - type 11: 10-node tetrahedron (corners 0–3, then mid-edge nodes on the
//!   edges 01, 12, 20, 03, 13, 23),
//! - type 9: 6-node triangle (corners, then mid-edge nodes on 01, 12, 20),
//!   used for named face sets,
//! - type 15: single-node point, used only to bind nodes into named sets.
//!
//! Anything else is rejected. Physical-group names bind both node sets (the
//! union of all nodes of the group's elements) and, for triangles, face
//! sets. Note the tetrahedron mid-edge ordering above is this toolkit's
//! interchange convention; files produced by other tools may order the last
//! two mid-edge nodes differently, which the mid-edge midpoint validation
//! will reject rather than silently misread.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::mesh::{Face6, Mesh};
use crate::FemError;

/// Parses a mesh from ASCII text, validating it fully.
pub fn parse_msh(text: &str) -> Result<Mesh, FemError> {
    let mut lines = text.lines().enumerate().peekable();
    let mut mesh = Mesh::default();
    let mut physical_names: BTreeMap<i64, String> = BTreeMap::new();
    let mut node_ids: BTreeMap<i64, usize> = BTreeMap::new();
    let mut group_nodes: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut saw_nodes = false;
    let mut saw_elements = false;

    let parse_err = |line: usize, message: String| FemError::Parse { line: line + 1, message };

    while let Some((line_no, line)) = lines.next() {
        let section = line.trim();
        if section.is_empty() {
            continue;
        }
        match section {
            "$MeshFormat" => {
                let (n, header) = lines
                    .next()
                    .ok_or_else(|| parse_err(line_no, "missing mesh format line".into()))?;
                let mut fields = header.split_whitespace();
                let version = fields.next().unwrap_or("");
                if !version.starts_with("2.2") {
                    return Err(parse_err(n, format!("unsupported mesh format version `{version}`")));
                }
                expect_end(&mut lines, "$EndMeshFormat")?;
            }
            "$PhysicalNames" => {
                let (n, count_line) =
                    lines.next().ok_or_else(|| parse_err(line_no, "missing count".into()))?;
                let count: usize = count_line
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(n, format!("bad physical-name count `{count_line}`")))?;
                for _ in 0..count {
                    let (n, entry) =
                        lines.next().ok_or_else(|| parse_err(n, "truncated physical names".into()))?;
                    let mut fields = entry.split_whitespace();
                    let _dim: i64 = next_int(&mut fields, n, "dimension")?;
                    let tag: i64 = next_int(&mut fields, n, "tag")?;
                    let name = entry
                        .split('"')
                        .nth(1)
                        .ok_or_else(|| parse_err(n, "physical name must be quoted".into()))?;
                    physical_names.insert(tag, name.to_string());
                }
                expect_end(&mut lines, "$EndPhysicalNames")?;
            }
            "$Nodes" => {
                saw_nodes = true;
                let (n, count_line) =
                    lines.next().ok_or_else(|| parse_err(line_no, "missing node count".into()))?;
                let count: usize = count_line
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(n, format!("bad node count `{count_line}`")))?;
                for _ in 0..count {
                    let (n, entry) = lines.next().ok_or_else(|| parse_err(n, "truncated nodes".into()))?;
                    let mut fields = entry.split_whitespace();
                    let id: i64 = next_int(&mut fields, n, "node id")?;
                    let x = next_float(&mut fields, n, "x")?;
                    let y = next_float(&mut fields, n, "y")?;
                    let z = next_float(&mut fields, n, "z")?;
                    if node_ids.insert(id, mesh.nodes.len()).is_some() {
                        return Err(parse_err(n, format!("duplicate node id {id}")));
                    }
                    mesh.nodes.push([x, y, z]);
                }
                expect_end(&mut lines, "$EndNodes")?;
            }
            "$Elements" => {
                saw_elements = true;
                let (n, count_line) =
                    lines.next().ok_or_else(|| parse_err(line_no, "missing element count".into()))?;
                let count: usize = count_line
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(n, format!("bad element count `{count_line}`")))?;
                for _ in 0..count {
                    let (n, entry) =
                        lines.next().ok_or_else(|| parse_err(n, "truncated elements".into()))?;
                    let mut fields = entry.split_whitespace();
                    let id: i64 = next_int(&mut fields, n, "element id")?;
                    let el_type: i64 = next_int(&mut fields, n, "element type")?;
                    let n_tags: usize = next_int(&mut fields, n, "tag count")? as usize;
                    let mut physical_tag: Option<i64> = None;
                    for t in 0..n_tags {
                        let tag: i64 = next_int(&mut fields, n, "tag")?;
                        if t == 0 {
                            physical_tag = Some(tag);
                        }
                    }
                    let group = physical_tag.and_then(|t| physical_names.get(&t)).cloned();

                    let resolve = |field: Option<&str>| -> Result<usize, FemError> {
                        let raw = field
                            .ok_or_else(|| parse_err(n, format!("element {id}: missing node")))?;
                        let node_id: i64 = raw
                            .parse()
                            .map_err(|_| parse_err(n, format!("element {id}: bad node `{raw}`")))?;
                        node_ids
                            .get(&node_id)
                            .copied()
                            .ok_or_else(|| parse_err(n, format!("element {id}: unknown node {node_id}")))
                    };

                    match el_type {
                        11 => {
                            let mut conn = [0usize; 10];
                            for slot in &mut conn {
                                *slot = resolve(fields.next())?;
                            }
                            mesh.elements.push(conn);
                            if let Some(name) = &group {
                                group_nodes.entry(name.clone()).or_default().extend_from_slice(&conn);
                            }
                        }
                        9 => {
                            let mut face: Face6 = [0; 6];
                            for slot in &mut face {
                                *slot = resolve(fields.next())?;
                            }
                            if let Some(name) = &group {
                                mesh.face_sets.entry(name.clone()).or_default().push(face);
                                group_nodes.entry(name.clone()).or_default().extend_from_slice(&face);
                            }
                        }
                        15 => {
                            let node = resolve(fields.next())?;
                            if let Some(name) = &group {
                                group_nodes.entry(name.clone()).or_default().push(node);
                            }
                        }
                        other => {
                            return Err(FemError::UnsupportedElementType {
                                element_id: id as usize,
                                element_type: other as i32,
                            });
                        }
                    }
                }
                expect_end(&mut lines, "$EndElements")?;
            }
            other if other.starts_with('$') && !other.starts_with("$End") => {
                // Skip unknown sections up to their matching end marker.
                let end = format!("$End{}", &other[1..]);
                for (_, candidate) in lines.by_ref() {
                    if candidate.trim() == end {
                        break;
                    }
                }
            }
            other => {
                return Err(parse_err(line_no, format!("unexpected content `{other}`")));
            }
        }
    }

    if !saw_nodes || !saw_elements {
        return Err(FemError::Parse {
            line: 0,
            message: "mesh file must contain $Nodes and $Elements sections".into(),
        });
    }

    for (name, mut nodes) in group_nodes {
        nodes.sort_unstable();
        nodes.dedup();
        mesh.node_sets.insert(name, nodes);
    }
    mesh.validate()?;
    Ok(mesh)
}

pub fn parse_msh_file(path: &Path) -> Result<Mesh, FemError> {
    parse_msh(&std::fs::read_to_string(path)?)
}

fn expect_end<'a, I: Iterator<Item = (usize, &'a str)>>(
    lines: &mut I,
    marker: &str,
) -> Result<(), FemError> {
    match lines.next() {
        Some((_, line)) if line.trim() == marker => Ok(()),
        Some((n, line)) => Err(FemError::Parse {
            line: n + 1,
            message: format!("expected `{marker}`, found `{}`", line.trim()),
        }),
        None => Err(FemError::Parse { line: 0, message: format!("missing `{marker}`") }),
    }
}

fn next_int<'a, I: Iterator<Item = &'a str>>(
    fields: &mut I,
    line: usize,
    what: &str,
) -> Result<i64, FemError> {
    let raw = fields
        .next()
        .ok_or_else(|| FemError::Parse { line: line + 1, message: format!("missing {what}") })?;
    raw.parse()
        .map_err(|_| FemError::Parse { line: line + 1, message: format!("bad {what} `{raw}`") })
}

fn next_float<'a, I: Iterator<Item = &'a str>>(
    fields: &mut I,
    line: usize,
    what: &str,
) -> Result<f64, FemError> {
    let raw = fields
        .next()
        .ok_or_else(|| FemError::Parse { line: line + 1, message: format!("missing {what}") })?;
    raw.parse()
        .map_err(|_| FemError::Parse { line: line + 1, message: format!("bad {what} `{raw}`") })
}

/// Writes a mesh in the interchange format. Face sets become type-9
/// triangles; node sets become type-15 points; volume elements carry a
/// shared `body` group.
pub fn write_msh(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");

    // Physical names: 3 = body, faces dim 2, node sets dim 0.
    let mut names: Vec<(i64, i64, String)> = vec![(3, 1, "body".to_string())];
    let mut next_tag = 2i64;
    let mut face_tags: BTreeMap<&str, i64> = BTreeMap::new();
    for name in mesh.face_sets.keys() {
        names.push((2, next_tag, name.clone()));
        face_tags.insert(name, next_tag);
        next_tag += 1;
    }
    let mut node_tags: BTreeMap<&str, i64> = BTreeMap::new();
    for name in mesh.node_sets.keys() {
        names.push((0, next_tag, name.clone()));
        node_tags.insert(name, next_tag);
        next_tag += 1;
    }
    let _ = writeln!(out, "$PhysicalNames\n{}", names.len());
    for (dim, tag, name) in &names {
        let _ = writeln!(out, "{dim} {tag} \"{name}\"");
    }
    out.push_str("$EndPhysicalNames\n");

    let _ = writeln!(out, "$Nodes\n{}", mesh.nodes.len());
    for (i, node) in mesh.nodes.iter().enumerate() {
        let _ = writeln!(out, "{} {} {} {}", i + 1, node[0], node[1], node[2]);
    }
    out.push_str("$EndNodes\n");

    let n_elements = mesh.elements.len()
        + mesh.face_sets.values().map(Vec::len).sum::<usize>()
        + mesh.node_sets.values().map(Vec::len).sum::<usize>();
    let _ = writeln!(out, "$Elements\n{n_elements}");
    let mut id = 1usize;
    for conn in &mesh.elements {
        let _ = write!(out, "{id} 11 2 1 1");
        for &node in conn {
            let _ = write!(out, " {}", node + 1);
        }
        out.push('\n');
        id += 1;
    }
    for (name, faces) in &mesh.face_sets {
        let tag = face_tags[name.as_str()];
        for face in faces {
            let _ = write!(out, "{id} 9 2 {tag} {tag}");
            for &node in face {
                let _ = write!(out, " {}", node + 1);
            }
            out.push('\n');
            id += 1;
        }
    }
    for (name, nodes) in &mesh.node_sets {
        let tag = node_tags[name.as_str()];
        for &node in nodes {
            let _ = writeln!(out, "{id} 15 2 {tag} {tag} {}", node + 1);
            id += 1;
        }
    }
    out.push_str("$EndElements\n");
    out
}
