//! Textual encodings: settings `n=3,m=3,q=1,1,1`, orders `a>b>c`,
//! profiles `a>b>c;b>a>c;b>c>a`.

use crate::error::{Error, Result};
use crate::model::{PrefOrder, Profile, Setting};

/// Parses `n=<int>,m=<int>,q=<int>[,<int>...]`. A single capacity is
/// broadcast to all objects. With `pad_dummy`, a dummy object absorbs any
/// supply shortfall.
pub fn parse_setting(text: &str, pad_dummy: bool) -> Result<Setting> {
    let mut n = None;
    let mut m = None;
    let mut q: Vec<u64> = Vec::new();
    let mut in_q = false;
    let mut offset = 0;
    for part in text.split(',') {
        let trimmed = part.trim();
        if let Some((key, value)) = trimmed.split_once('=') {
            let value = value.trim();
            let parsed: u64 = value
                .parse()
                .map_err(|_| Error::parse(offset, format!("expected integer for '{}'", key.trim())))?;
            match key.trim() {
                "n" => {
                    n = Some(parsed as usize);
                    in_q = false;
                }
                "m" => {
                    m = Some(parsed as usize);
                    in_q = false;
                }
                "q" => {
                    q.push(parsed);
                    in_q = true;
                }
                other => return Err(Error::parse(offset, format!("unknown key '{other}'"))),
            }
        } else if in_q {
            q.push(
                trimmed
                    .parse()
                    .map_err(|_| Error::parse(offset, format!("bad capacity '{trimmed}'")))?,
            );
        } else {
            return Err(Error::parse(offset, format!("unexpected '{trimmed}'")));
        }
        offset += part.len() + 1;
    }
    let n = n.ok_or_else(|| Error::parse(0, "missing n="))?;
    let m = m.ok_or_else(|| Error::parse(0, "missing m="))?;
    if q.is_empty() {
        q = vec![1; m];
    } else if q.len() == 1 && m > 1 {
        q = vec![q[0]; m];
    }
    if pad_dummy {
        Setting::with_dummy_padding(n, m, q)
    } else {
        Setting::new(n, m, q)
    }
}

/// Parses `a>b>c` against the setting's labels. When the setting carries a
/// dummy object, it may be omitted and is then ranked last.
pub fn parse_pref(setting: &Setting, text: &str) -> Result<PrefOrder> {
    parse_pref_at(setting, text, 0)
}

fn parse_pref_at(setting: &Setting, text: &str, base: usize) -> Result<PrefOrder> {
    let mut ranking = Vec::with_capacity(setting.objects());
    let mut offset = base;
    for label in text.split('>') {
        let trimmed = label.trim();
        let object = setting
            .object_index(trimmed)
            .ok_or_else(|| Error::parse(offset, format!("unknown object '{trimmed}'")))?;
        if ranking.contains(&object) {
            return Err(Error::parse(offset, format!("object '{trimmed}' repeated")));
        }
        ranking.push(object);
        offset += label.len() + 1;
    }
    if let Some(d) = setting.dummy() {
        if !ranking.contains(&d) {
            ranking.push(d);
        }
    }
    if ranking.len() != setting.objects() {
        return Err(Error::parse(
            base,
            format!(
                "order '{text}' ranks {} of {} objects",
                ranking.len(),
                setting.objects()
            ),
        ));
    }
    PrefOrder::new(ranking)
}

/// Parses semicolon-separated orders, one per agent.
pub fn parse_profile(setting: &Setting, text: &str) -> Result<Profile> {
    let mut prefs = Vec::new();
    let mut offset = 0;
    for part in text.split(';') {
        prefs.push(parse_pref_at(setting, part, offset)?);
        offset += part.len() + 1;
    }
    Profile::for_setting(setting, prefs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn settings_parse() {
        let s = parse_setting("n=3,m=3,q=1,1,1", false).unwrap();
        assert_eq!(s, Setting::unit(3, 3).unwrap());
        let s = parse_setting("n=4,m=3,q=1,1,2", false).unwrap();
        assert_eq!(s.capacities(), &[1, 1, 2]);
        let s = parse_setting("n=6,m=3,q=2", false).unwrap();
        assert_eq!(s.capacities(), &[2, 2, 2]);
        assert!(parse_setting("n=3,m=2,q=1,1", false).is_err());
        let s = parse_setting("n=3,m=2,q=1,1", true).unwrap();
        assert_eq!(s.objects(), 3);
        assert!(matches!(parse_setting("n=3,k=2", false), Err(Error::Parse { .. })));
    }

    #[test]
    fn orders_and_profiles_round_trip() {
        let s = Setting::unit(3, 3).unwrap();
        let p = parse_profile(&s, "a>b>c;b>a>c;b>c>a").unwrap();
        assert_eq!(p.pref(2).ranking(), &[1, 2, 0]);
        assert_eq!(p.display(&s), "a>b>c;b>a>c;b>c>a");
        assert!(parse_profile(&s, "a>b>c;b>a>c").is_err());
        match parse_profile(&s, "a>b>c;b>x>c;b>c>a") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 8),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_pref(&s, "a>a>b").is_err());
    }

    #[test]
    fn dummy_is_appended() {
        let s = parse_setting("n=3,m=2,q=1,1", true).unwrap();
        let t = parse_pref(&s, "b>a").unwrap();
        assert_eq!(t.ranking(), &[1, 0, 2]);
        assert_eq!(t.display(&s), "b>a>_");
        assert_eq!(parse_pref(&s, "b>a>_").unwrap(), t);
    }
}
