use std::collections::HashMap;

/// Anything that can hand out phrase IDs for phrase contents.
pub trait PhraseRegistry {
    /// ID for `phrase`, registering it if it is new.
    fn id_for(&mut self, phrase: &[u8]) -> u32;
}

/// Content-keyed phrase store. IDs are dense and assigned in insertion order,
/// and lookups compare full contents, so two distinct phrases never share an ID.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhraseDictionary {
    ids: HashMap<Vec<u8>, u32>,
    phrases: Vec<Vec<u8>>,
}

impl PhraseDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn insert(&mut self, phrase: &[u8]) -> u32 {
        if let Some(&id) = self.ids.get(phrase) {
            return id;
        }
        let id = u32::try_from(self.phrases.len()).expect("phrase dictionary overflow");
        self.ids.insert(phrase.to_vec(), id);
        self.phrases.push(phrase.to_vec());
        id
    }

    pub fn id_of(&self, phrase: &[u8]) -> Option<u32> {
        self.ids.get(phrase).copied()
    }

    pub fn phrase(&self, id: u32) -> Option<&[u8]> {
        self.phrases.get(id as usize).map(Vec::as_slice)
    }

    /// Phrases in ID order.
    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.phrases.iter().map(Vec::as_slice)
    }

    /// Read-only view that assigns fresh, local IDs to unseen phrases.
    pub fn overlay(&self) -> DictionaryOverlay<'_> {
        DictionaryOverlay {
            base: self,
            extra: HashMap::new(),
        }
    }
}

impl PhraseRegistry for PhraseDictionary {
    fn id_for(&mut self, phrase: &[u8]) -> u32 {
        self.insert(phrase)
    }
}

impl FromIterator<Vec<u8>> for PhraseDictionary {
    fn from_iter<I: IntoIterator<Item = Vec<u8>>>(iter: I) -> Self {
        let mut dict = Self::new();
        for p in iter {
            dict.insert(&p);
        }
        dict
    }
}

/// Pattern-side registry over a frozen dictionary. Known phrases keep their
/// shared IDs; new ones get IDs past the end of the base dictionary, which
/// never occur in an index built from it.
#[derive(Debug)]
pub struct DictionaryOverlay<'a> {
    base: &'a PhraseDictionary,
    extra: HashMap<Vec<u8>, u32>,
}

impl DictionaryOverlay<'_> {
    pub fn local_len(&self) -> usize {
        self.extra.len()
    }
}

impl PhraseRegistry for DictionaryOverlay<'_> {
    fn id_for(&mut self, phrase: &[u8]) -> u32 {
        if let Some(id) = self.base.id_of(phrase) {
            return id;
        }
        let next = (self.base.len() + self.extra.len()) as u32;
        *self.extra.entry(phrase.to_vec()).or_insert(next)
    }
}
