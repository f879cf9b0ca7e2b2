use super::{PolyConfig, VALIDATE_EPS};
use crate::error::{invalid, Result};
use crate::evolution::{EntryEvent, EntryKind};
use crate::geometry::{Domain, Plane, Vec3};
use crate::kinematics::{newborn_triangle_normals, stable_ie, stable_it, IeOutcome, SliceLine};

/// Earliest point of a face: the vertex of its outer cycle with the smallest
/// time coordinate.
fn earliest(points: &[Vec3]) -> Vec3 {
    *points.iter().min_by(|a, b| a.x.total_cmp(&b.x).then(a.lex_cmp(**b))).expect("nonempty cycle")
}

fn by_normal(a: &Plane, b: &Plane) -> std::cmp::Ordering {
    a.u.lex_cmp(b.u).then(a.rho.total_cmp(&b.rho))
}

/// Boundary births implied by a configuration.
///
/// A face whose earliest point lies on the domain boundary was born there.
/// Two such faces sharing the point inside a single facet form an angle
/// entry, a single face at a point of a domain edge an edge entry; each is
/// kept only if the birth it describes is stable. Anything else touching the
/// boundary at its earliest point is a truncation.
pub fn entry_events(cfg: &PolyConfig, d: &Domain) -> Result<Vec<EntryEvent>> {
    let tol = VALIDATE_EPS * d.scale();
    if cfg.faces.iter().any(|f| f.polygon.outer.is_empty()) {
        return invalid("face without vertices");
    }
    // faces grouped by a shared boundary starting point
    let mut groups: Vec<(Vec3, Vec<usize>)> = Vec::new();
    for (i, f) in cfg.faces.iter().enumerate() {
        let x = earliest(&f.polygon.outer);
        if d.depth(x) > tol {
            continue;
        }
        match groups.iter_mut().find(|(y, _)| y.dist(x) <= tol) {
            Some((_, g)) => g.push(i),
            None => groups.push((x, vec![i])),
        }
    }
    let mut out = Vec::new();
    for (x, g) in groups {
        let on: Vec<usize> = (0..d.facets().len())
            .filter(|&k| d.facets()[k].halfspace.slack(x).abs() <= tol && !d.is_temporal_facet(k))
            .collect();
        let mut planes: Vec<Plane> = g.iter().map(|&i| cfg.faces[i].polygon.plane).collect();
        planes.sort_by(by_normal);
        let lines: Result<Vec<SliceLine>> = planes.iter().map(SliceLine::from_plane).collect();
        let Ok(lines) = lines else { continue };
        match (&on[..], &lines[..]) {
            (&[k], &[l2, l3]) => {
                let lk = SliceLine::from_halfspace(&d.facets()[k].halfspace)?;
                let Ok(tn) = newborn_triangle_normals([&lk, &l2, &l3]) else { continue };
                if stable_it([&lk, &l2, &l3], tn).unwrap_or(false) && tn[0].dot(lk.normal) > 0.0 {
                    out.push(EntryEvent::new(EntryKind::Ia, x, planes)?);
                }
            }
            (&[k1, k2], &[lc]) => {
                let l1 = SliceLine::from_halfspace(&d.facets()[k1].halfspace)?;
                let l2 = SliceLine::from_halfspace(&d.facets()[k2].halfspace)?;
                let into = |l: &SliceLine, o: &SliceLine| {
                    let dir = l.direction();
                    if dir.dot(o.normal) < 0.0 {
                        dir
                    } else {
                        -dir
                    }
                };
                let (u1, u2) = (into(&l1, &l2), into(&l2, &l1));
                if stable_ie(&l1, &l2, u1, u2, &lc) == Ok(IeOutcome::CornerCut) {
                    out.push(EntryEvent::new(EntryKind::Ie, x, planes)?);
                }
            }
            _ => {}
        }
    }
    out.sort_by(|a, b| a.time.total_cmp(&b.time).then(a.location.lex_cmp(b.location)));
    Ok(out)
}
