//! Text form of function spaces.
//!
//! ```text
//! ces:<p>,<q>:<u>,<v>@(<a>,<b>)
//! cop:<p>,<q>:<u>,<v>@(<a>,<b>)
//! leb:<p>:<v>@(<a>,<b>)
//! ```
//!
//! Weights use the core weight DSL; `b` may be `inf`.

use cesembed_core::weights::DslReader;
use cesembed_core::{Error, Interval, Result, SpaceKind, SpaceSpec};

pub fn parse_spec(text: &str) -> Result<SpaceSpec<f64>> {
    let mut r = DslReader::new(text);
    let at = r.pos();
    let kind = match r.ident()? {
        "ces" => SpaceKind::Ces,
        "cop" => SpaceKind::Cop,
        "leb" => SpaceKind::Leb,
        other => return Err(Error::Parse { pos: at, msg: format!("unknown space kind `{other}`") }),
    };
    r.expect(':')?;
    let p = r.exponent()?;
    let spec = if kind == SpaceKind::Leb {
        r.expect(':')?;
        let v = r.weight()?;
        let iv = interval(&mut r)?;
        SpaceSpec::lebesgue(p, v, iv)?
    } else {
        r.expect(',')?;
        let q = r.exponent()?;
        r.expect(':')?;
        let u = r.weight()?;
        r.expect(',')?;
        let v = r.weight()?;
        let iv = interval(&mut r)?;
        SpaceSpec::new(kind, p, q, u, v, iv)?
    };
    if r.peek().is_some() {
        return Err(r.error("trailing input after space specification"));
    }
    Ok(spec)
}

fn interval(r: &mut DslReader<'_>) -> Result<Interval<f64>> {
    r.expect('@')?;
    r.expect('(')?;
    let at = r.pos();
    let a: f64 = r.scalar()?;
    r.expect(',')?;
    let b: f64 = r.scalar()?;
    r.expect(')')?;
    Interval::new(a, b).map_err(|e| Error::Parse { pos: at, msg: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cesembed_core::{Exponent, WeightExpr};

    #[test]
    fn unit_weights() {
        let s = parse_spec("ces:1,2:pow:0,pow:0@(0,1)").unwrap();
        assert_eq!(s.kind, SpaceKind::Ces);
        assert_eq!(s.p, Exponent::integer(1));
        assert_eq!(s.q, Exponent::integer(2));
        assert!(s.u_expr().is_unit() && s.v_expr().is_unit());
        assert_eq!(s.interval, Interval::new(0.0, 1.0).unwrap());
    }

    #[test]
    fn classical_shapes() {
        let cop = parse_spec("cop:1,1:pow:0,pow:-1@(0,inf)").unwrap();
        assert_eq!(cop.kind, SpaceKind::Cop);
        assert_eq!(cop.v_expr(), &WeightExpr::power(-1.0));
        assert!(cop.interval.b.is_infinite());
        let ces = parse_spec("ces:1,3/2:pow:-1,pow:0@(0,inf)").unwrap();
        assert_eq!(ces.q, Exponent::finite(3, 2).unwrap());
        assert_eq!(ces.u_expr(), &WeightExpr::power(-1.0));
    }

    #[test]
    fn weights_with_commas() {
        let s = parse_spec("ces:2,1:powlog:-2,1,prod:pow:1;pow:0.5@(1,inf)").unwrap();
        assert_eq!(s.u_expr(), &WeightExpr::power_log(-2.0, 1.0));
        let leb = parse_spec("leb:3/2:pow:0.25@(0,2)").unwrap();
        assert_eq!(leb.kind, SpaceKind::Leb);
        assert_eq!(leb.p, Exponent::finite(3, 2).unwrap());
    }

    #[test]
    fn round_trip() {
        for text in [
            "ces:1,2:pow:0,pow:0@(0,1)",
            "cop:1/2,3:pow:1,pow:-1/3@(0,1)",
            "ces:2,inf:pow:-1,pow:0.5@(0,inf)",
            "leb:2:pow:0.3@(1,inf)",
        ] {
            let s = parse_spec(text).unwrap();
            assert_eq!(parse_spec(&s.to_string()).unwrap(), s, "{text} -> {s}");
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_spec("ces:1,2:pow:0,pow:0@(0,1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_spec("foo:1,2:pow:0,pow:0@(0,1)"), Err(Error::Parse { pos: 0, .. })));
        match parse_spec("ces:1,2:pow:0,pow:0@(0,1)x") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 25),
            other => panic!("{other:?}"),
        }
        // u = 1 on (0, inf) has infinite tail norm
        assert!(matches!(parse_spec("ces:1,1:pow:0,pow:0@(0,inf)"), Err(Error::Spec(_))));
    }
}
