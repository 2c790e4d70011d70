//! Integer-keyed maps as lists of pairs. JSON object keys are strings, and
//! tagged enums cannot turn them back into integers.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub mod flat {
    use super::*;

    pub fn serialize<K: Serialize, V: Serialize, S: Serializer>(m: &BTreeMap<K, V>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(m.iter())
    }

    pub fn deserialize<'de, K, V, D>(d: D) -> Result<BTreeMap<K, V>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        Ok(Vec::<(K, V)>::deserialize(d)?.into_iter().collect())
    }
}

pub mod nested {
    use super::*;

    pub fn serialize<K, J, V, S>(m: &BTreeMap<K, BTreeMap<J, V>>, s: S) -> Result<S::Ok, S::Error>
    where
        K: Serialize,
        J: Serialize,
        V: Serialize,
        S: Serializer,
    {
        s.collect_seq(m.iter().map(|(k, row)| (k, row.iter().collect::<Vec<_>>())))
    }

    pub fn deserialize<'de, K, J, V, D>(d: D) -> Result<BTreeMap<K, BTreeMap<J, V>>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        J: Deserialize<'de> + Ord,
        V: Deserialize<'de>,
        D: Deserializer<'de>,
    {
        let rows = Vec::<(K, Vec<(J, V)>)>::deserialize(d)?;
        Ok(rows.into_iter().map(|(k, row)| (k, row.into_iter().collect())).collect())
    }
}
