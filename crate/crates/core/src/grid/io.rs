use std::io::{Read, Write};
use std::sync::Arc;

use super::domain::{DomainKind, GridDomain, NodeKind};
use super::field::ScalarField;
use crate::error::{Error, Result};

pub const HCL1_MAGIC: &[u8; 4] = b"HCL1";
/// Flag bit marking an `X × S` product; bit `a` marks axis `a` periodic.
pub const PRODUCT_FLAG: u32 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hcl1Header {
    pub n: u32,
    pub counts: Vec<u32>,
    pub flags: u32,
}

impl Hcl1Header {
    pub fn for_domain(d: &GridDomain) -> Self {
        let mut flags = 0;
        for (a, &p) in d.periodic().iter().enumerate() {
            if p {
                flags |= 1 << a;
            }
        }
        if d.kind() == DomainKind::ProductXS {
            flags |= PRODUCT_FLAG;
        }
        Self { n: d.n() as u32, counts: d.counts().iter().map(|&c| c as u32).collect(), flags }
    }

    pub fn node_count(&self) -> usize {
        self.counts.iter().map(|&c| c as usize).product()
    }
}

fn u32_le(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

pub fn write_hcl1(field: &ScalarField, w: &mut impl Write) -> Result<()> {
    let h = Hcl1Header::for_domain(field.domain());
    w.write_all(HCL1_MAGIC)?;
    w.write_all(&h.n.to_le_bytes())?;
    for c in &h.counts {
        w.write_all(&c.to_le_bytes())?;
    }
    w.write_all(&h.flags.to_le_bytes())?;
    for v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_hcl1(r: &mut impl Read) -> Result<(Hcl1Header, Vec<f64>)> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != HCL1_MAGIC {
        return Err(Error::Config("not an HCL1 field container".into()));
    }
    let n = u32_le(r)?;
    if n == 0 || n > 16 {
        return Err(Error::Config(format!("implausible dimension {n} in field header")));
    }
    let counts = (0..2 * n).map(|_| u32_le(r)).collect::<Result<Vec<_>>>()?;
    let flags = u32_le(r)?;
    let header = Hcl1Header { n, counts, flags };
    let mut values = Vec::with_capacity(header.node_count());
    let mut b = [0u8; 8];
    for _ in 0..header.node_count() {
        r.read_exact(&mut b)?;
        values.push(f64::from_le_bytes(b));
    }
    Ok((header, values))
}

impl ScalarField {
    /// Reads a container and checks it matches `domain`.
    pub fn read_hcl1(domain: Arc<GridDomain>, r: &mut impl Read) -> Result<Self> {
        let (header, values) = read_hcl1(r)?;
        if header != Hcl1Header::for_domain(&domain) {
            return Err(Error::Config("field container does not match the configured grid".into()));
        }
        ScalarField::new(domain, values)
    }
}

/// `# hcl-schema v1` comment, then one row per node with coordinates, node
/// kind and value.
pub fn write_field_csv(field: &ScalarField, w: &mut impl Write) -> Result<()> {
    let d = field.domain();
    writeln!(w, "# hcl-schema v1")?;
    let mut head = vec!["node".to_string()];
    for j in 1..=d.n() {
        head.push(format!("x{j}"));
        head.push(format!("y{j}"));
    }
    head.push("kind".into());
    head.push("value".into());
    writeln!(w, "{}", head.join(","))?;
    for i in 0..d.len() {
        let kind = match d.node_kind(i) {
            NodeKind::Interior => "interior",
            NodeKind::Boundary => "boundary",
            NodeKind::Exterior => "exterior",
        };
        let coords: Vec<String> = d.coords(i).iter().map(|c| format!("{c}")).collect();
        writeln!(w, "{i},{},{kind},{}", coords.join(","), field.get(i))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SFactor;

    #[test]
    fn roundtrip() {
        let d = Arc::new(GridDomain::product_uniform(2, 3, &SFactor::unit_square(2)).unwrap());
        let u = ScalarField::from_fn(d.clone(), |x| x.iter().sum::<f64>().sin()).unwrap();
        let mut buf = Vec::new();
        write_hcl1(&u, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"HCL1");
        assert_eq!(buf.len(), 4 + 4 + 16 + 4 + 8 * d.len());
        let (h, _) = read_hcl1(&mut buf.as_slice()).unwrap();
        assert_eq!(h.flags, PRODUCT_FLAG | 0b11);
        let back = ScalarField::read_hcl1(d, &mut buf.as_slice()).unwrap();
        assert_eq!(back.values(), u.values());
        let other = Arc::new(GridDomain::cubic_torus(2, 3).unwrap());
        assert!(ScalarField::read_hcl1(other, &mut buf.as_slice()).is_err());
        assert!(read_hcl1(&mut &b"HCL2"[..]).is_err());
    }

    #[test]
    fn csv_layout() {
        let d = Arc::new(GridDomain::product(1, &[], &[], &SFactor::unit_square(1)).unwrap());
        let mut buf = Vec::new();
        write_field_csv(&ScalarField::constant(d, 0.5), &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# hcl-schema v1");
        assert_eq!(lines[1], "node,x1,y1,kind,value");
        assert_eq!(lines[2], "0,0,0,boundary,0.5");
        assert_eq!(lines.len(), 6);
    }
}
