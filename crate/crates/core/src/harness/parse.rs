//! Compact textual forms for domains and graph models.
//!
//! Domains: `rect:A,B` (`[0,A]×[0,B]`), `rect:X0,Y0,X1,Y1`,
//! `hole:X0,Y0,X1,Y1/HX0,HY0,HX1,HY1`, `interval:L`, `interval:LO,HI`,
//! `polygon:X,Y;X,Y;...` (counterclockwise).
//!
//! Graphs: `indicator:R`, `poly:R,C0,ALPHA`, `two-level:R,P,Q`, `scaled:R,P`,
//! `knn:K` or `knn:K,mutual`.

use crate::error::{Error, Result};
use crate::geometry::{Domain, Rect};
use crate::linkgraph::{LinkFunction, Symmetrization};

#[derive(Debug, Clone, PartialEq)]
pub enum GraphModel {
    Link(LinkFunction),
    Knn { kappa: usize, mode: Symmetrization },
}

fn numbers(s: &str, sep: char) -> Result<Vec<f64>> {
    s.split(sep)
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::invalid(format!("`{t}` is not a number"))))
        .collect()
}

fn split_kind(s: &str) -> Result<(&str, &str)> {
    s.split_once(':').ok_or_else(|| Error::invalid(format!("expected `kind:params`, got `{s}`")))
}

fn rect4(v: &[f64]) -> Result<Rect> {
    Rect::new([v[0], v[1]], [v[2], v[3]])
}

pub fn parse_domain(s: &str) -> Result<Domain> {
    let (kind, rest) = split_kind(s)?;
    match kind {
        "rect" => {
            let v = numbers(rest, ',')?;
            match v.len() {
                2 => Domain::rectangle(v[0], v[1]),
                4 => Ok(Domain::Rectangle(rect4(&v)?)),
                _ => Err(Error::invalid("rect takes 2 or 4 numbers")),
            }
        }
        "hole" => {
            let (o, h) = rest.split_once('/').ok_or_else(|| Error::invalid("hole needs `outer/hole`"))?;
            let (o, h) = (numbers(o, ',')?, numbers(h, ',')?);
            if o.len() != 4 || h.len() != 4 {
                return Err(Error::invalid("hole rectangles take 4 numbers each"));
            }
            Domain::rectangle_with_hole(rect4(&o)?, rect4(&h)?)
        }
        "interval" => {
            let v = numbers(rest, ',')?;
            match v.len() {
                1 => Domain::interval(v[0]),
                2 => Domain::interval_between(v[0], v[1]),
                _ => Err(Error::invalid("interval takes 1 or 2 numbers")),
            }
        }
        "polygon" => {
            let verts = rest
                .split(';')
                .map(|p| {
                    let v = numbers(p, ',')?;
                    if v.len() == 2 {
                        Ok([v[0], v[1]])
                    } else {
                        Err(Error::invalid(format!("polygon vertex `{p}` needs 2 numbers")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Domain::convex_polygon(verts)
        }
        _ => Err(Error::invalid(format!("unknown domain kind `{kind}`"))),
    }
}

pub fn format_domain(d: &Domain) -> String {
    match d {
        Domain::Rectangle(r) => format!("rect:{},{},{},{}", r.min[0], r.min[1], r.max[0], r.max[1]),
        Domain::RectangleWithHole { outer: o, hole: h } => format!(
            "hole:{},{},{},{}/{},{},{},{}",
            o.min[0], o.min[1], o.max[0], o.max[1], h.min[0], h.min[1], h.max[0], h.max[1]
        ),
        Domain::Interval { lo, hi } => format!("interval:{lo},{hi}"),
        Domain::ConvexPolygon(v) => {
            let pts: Vec<String> = v.iter().map(|p| format!("{},{}", p[0], p[1])).collect();
            format!("polygon:{}", pts.join(";"))
        }
    }
}

pub fn parse_graph_model(s: &str) -> Result<GraphModel> {
    let (kind, rest) = split_kind(s)?;
    if kind == "knn" {
        let mut parts = rest.split(',');
        let kappa = parts
            .next()
            .and_then(|k| k.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::invalid("knn needs an integer neighbour count"))?;
        let mode = match parts.next().map(str::trim) {
            None | Some("union") => Symmetrization::Union,
            Some("mutual") => Symmetrization::Mutual,
            Some(m) => return Err(Error::invalid(format!("unknown symmetrization `{m}`"))),
        };
        return Ok(GraphModel::Knn { kappa, mode });
    }
    let v = numbers(rest, ',')?;
    let need = |k: usize| -> Result<()> {
        if v.len() == k {
            Ok(())
        } else {
            Err(Error::invalid(format!("`{kind}` takes {k} numbers")))
        }
    };
    let link = match kind {
        "indicator" => {
            need(1)?;
            LinkFunction::indicator(v[0])?
        }
        "poly" => {
            need(3)?;
            LinkFunction::polynomial_edge(v[0], v[1], v[2])?
        }
        "two-level" => {
            need(3)?;
            LinkFunction::two_level(v[0], v[1], v[2])?
        }
        "scaled" => {
            need(2)?;
            LinkFunction::scaled_indicator(v[0], v[1])?
        }
        _ => return Err(Error::invalid(format!("unknown graph model `{kind}`"))),
    };
    Ok(GraphModel::Link(link))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domains_round_trip() {
        for s in ["rect:0,0,2,1", "hole:0,0,2,1/0.5,0.25,1.5,0.75", "interval:0,1", "polygon:0,0;1,0;0,1"] {
            let d = parse_domain(s).unwrap();
            assert_eq!(format_domain(&d), s);
        }
        assert_eq!(parse_domain("rect:4,1").unwrap(), Domain::rectangle(4.0, 1.0).unwrap());
        assert!(parse_domain("rect:1").is_err());
        assert!(parse_domain("blob:1").is_err());
        assert!(parse_domain("polygon:0,0;0,1;1,0").is_err());
    }

    #[test]
    fn graph_models() {
        assert_eq!(parse_graph_model("indicator:0.2").unwrap(), GraphModel::Link(LinkFunction::indicator(0.2).unwrap()));
        assert_eq!(
            parse_graph_model("knn:25,mutual").unwrap(),
            GraphModel::Knn { kappa: 25, mode: Symmetrization::Mutual }
        );
        assert!(matches!(parse_graph_model("two-level:0.2,1,0.01").unwrap(), GraphModel::Link(LinkFunction::TwoLevel { .. })));
        assert!(parse_graph_model("two-level:0.2,0.1,0.5").is_err());
        assert!(parse_graph_model("scaled:0.2").is_err());
        assert!(parse_graph_model("knn:x").is_err());
    }
}
