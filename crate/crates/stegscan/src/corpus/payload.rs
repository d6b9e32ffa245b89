use crate::error::{Error, Result};
use crate::stego::{EmbedMode, PayloadKind, PayloadSpec};
use crate::util::{adler32, crc32, Rng};
use crate::zip::{write_zip, ZipEntrySpec};

/// Payload families the corpus can hide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadType {
    Txt,
    /// Magic-less high-entropy bytes standing in for ciphertext.
    EncryptedTxt,
    Docx,
    Png,
    Zip,
    ZipEncrypted,
}

impl PayloadType {
    pub fn name(self) -> &'static str {
        match self {
            PayloadType::Txt => "txt",
            PayloadType::EncryptedTxt => "encrypted_txt",
            PayloadType::Docx => "docx",
            PayloadType::Png => "png",
            PayloadType::Zip => "zip",
            PayloadType::ZipEncrypted => "zip_encrypted",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "txt" => Some(PayloadType::Txt),
            "encrypted_txt" => Some(PayloadType::EncryptedTxt),
            "docx" => Some(PayloadType::Docx),
            "png" => Some(PayloadType::Png),
            "zip" => Some(PayloadType::Zip),
            "zip_encrypted" => Some(PayloadType::ZipEncrypted),
            _ => None,
        }
    }

    pub fn declared_kind(self) -> PayloadKind {
        match self {
            PayloadType::Txt | PayloadType::EncryptedTxt => PayloadKind::Txt,
            PayloadType::Docx => PayloadKind::Docx,
            PayloadType::Png => PayloadKind::Png,
            PayloadType::Zip | PayloadType::ZipEncrypted => PayloadKind::Zip,
        }
    }

    /// Smallest structurally valid artifact of this type.
    pub fn minimum_size(self) -> usize {
        match self {
            PayloadType::Txt | PayloadType::EncryptedTxt => 1,
            PayloadType::Png => PNG_BASE_LEN + 12,
            PayloadType::Zip => ZIP_FIXED_OVERHEAD + 1,
            PayloadType::ZipEncrypted => ZIP_FIXED_OVERHEAD + 12 + 1,
            PayloadType::Docx => DOCX_FIXED_OVERHEAD + 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedPayload {
    pub spec: PayloadSpec,
    pub payload_type: PayloadType,
    pub zip_password: Option<String>,
}

const WORDS: [&str; 24] = [
    "evidence", "carrier", "whisper", "archive", "signal", "meadow", "copper", "lattice",
    "harbor", "cinder", "velvet", "quartz", "merlin", "anchor", "breeze", "canyon", "drift",
    "ember", "flint", "grove", "hollow", "iris", "juniper", "kestrel",
];

fn seeded_text(size: usize, rng: &mut Rng) -> Vec<u8> {
    let mut out = Vec::with_capacity(size + 16);
    let mut line_len = 0usize;
    while out.len() < size {
        let word = WORDS[rng.below(WORDS.len() as u64) as usize];
        out.extend_from_slice(word.as_bytes());
        line_len += word.len();
        if line_len >= 64 {
            out.push(b'\n');
            line_len = 0;
        } else {
            out.push(b' ');
            line_len += 1;
        }
    }
    out.truncate(size);
    if let Some(last) = out.last_mut() {
        *last = b'\n';
    }
    out
}

/// PNG fixed parts: signature(8) + IHDR(25) + IEND(12); IDAT depends on the
/// image, which we pin to 16x16 grayscale.
const PNG_W: usize = 16;
const PNG_H: usize = 16;
// Raw scanlines: filter byte + row, zlib-wrapped as stored deflate blocks.
const PNG_RAW: usize = PNG_H * (PNG_W + 1);
const PNG_IDAT_BODY: usize = 2 + 5 + PNG_RAW + 4; // zlib hdr + one stored block hdr + raw + adler
const PNG_BASE_LEN: usize = 8 + 25 + (12 + PNG_IDAT_BODY) + 12;

fn png_chunk(out: &mut Vec<u8>, kind: &[u8; 4], body: &[u8]) {
    out.extend_from_slice(&(body.len() as u32).to_be_bytes());
    out.extend_from_slice(kind);
    out.extend_from_slice(body);
    let mut crc_input = Vec::with_capacity(4 + body.len());
    crc_input.extend_from_slice(kind);
    crc_input.extend_from_slice(body);
    out.extend_from_slice(&crc32(&crc_input).to_be_bytes());
}

/// Minimal valid grayscale PNG with seeded pixels, padded to the exact
/// requested size with a private ancillary chunk before IEND.
fn seeded_png(size: usize, rng: &mut Rng) -> Result<Vec<u8>> {
    let min = PayloadType::Png.minimum_size();
    if size < min {
        return Err(Error::SizeTooSmall {
            requested: size,
            minimum: min,
        });
    }
    let mut out = Vec::with_capacity(size);
    out.extend_from_slice(&[0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A]);

    let mut ihdr = Vec::with_capacity(13);
    ihdr.extend_from_slice(&(PNG_W as u32).to_be_bytes());
    ihdr.extend_from_slice(&(PNG_H as u32).to_be_bytes());
    ihdr.extend_from_slice(&[8, 0, 0, 0, 0]); // 8-bit grayscale
    png_chunk(&mut out, b"IHDR", &ihdr);

    let mut raw = Vec::with_capacity(PNG_RAW);
    for _ in 0..PNG_H {
        raw.push(0); // filter: none
        raw.extend(rng.bytes(PNG_W));
    }
    // zlib stream with a single stored deflate block.
    let mut idat = Vec::with_capacity(PNG_IDAT_BODY);
    idat.extend_from_slice(&[0x78, 0x01]);
    idat.push(0x01); // BFINAL=1, BTYPE=00 (stored)
    idat.extend_from_slice(&(raw.len() as u16).to_le_bytes());
    idat.extend_from_slice(&(!(raw.len() as u16)).to_le_bytes());
    idat.extend_from_slice(&raw);
    idat.extend_from_slice(&adler32(&raw).to_be_bytes());
    png_chunk(&mut out, b"IDAT", &idat);

    // Private ancillary padding chunk sized to land exactly on target.
    let pad_body = size - out.len() - 12 - 12; // this chunk + IEND
    png_chunk(&mut out, b"pdDg", &rng.bytes(pad_body));
    png_chunk(&mut out, b"IEND", &[]);
    debug_assert_eq!(out.len(), size);
    Ok(out)
}

/// Archive member accounting for exact-size ZIP payloads: local header +
/// central header + EOCD for one member with a fixed-length name.
const ZIP_MEMBER_NAME: &str = "data_0.bin";
const ZIP_FIXED_OVERHEAD: usize = (30 + ZIP_MEMBER_NAME.len()) + (46 + ZIP_MEMBER_NAME.len()) + 22;

fn seeded_zip(size: usize, password: Option<&str>, rng: &mut Rng) -> Result<Vec<u8>> {
    let overhead = ZIP_FIXED_OVERHEAD + if password.is_some() { 12 } else { 0 };
    if size <= overhead {
        return Err(Error::SizeTooSmall {
            requested: size,
            minimum: overhead + 1,
        });
    }
    let member = rng.bytes(size - overhead);
    let entry = match password {
        None => ZipEntrySpec::stored(ZIP_MEMBER_NAME, member),
        Some(pw) => ZipEntrySpec::encrypted(ZIP_MEMBER_NAME, member, pw),
    };
    let bytes = write_zip(&[entry], b"", rng);
    debug_assert_eq!(bytes.len(), size);
    Ok(bytes)
}

const DOCX_CONTENT_TYPES: &str = "[Content_Types].xml";
const DOCX_DOCUMENT: &str = "word/document.xml";
const DOCX_PAD: &str = "word/media/pad.bin";
const DOCX_TYPES_XML: &[u8] = b"<?xml version=\"1.0\"?><Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\"><Default Extension=\"xml\" ContentType=\"application/xml\"/></Types>";
const DOCX_DOC_XML: &[u8] = b"<?xml version=\"1.0\"?><w:document xmlns:w=\"http://schemas.openxmlformats.org/wordprocessingml/2006/main\"><w:body><w:p/></w:body></w:document>";

const fn docx_member_overhead(name_len: usize, body_len: usize) -> usize {
    30 + name_len + body_len + 46 + name_len
}

const DOCX_FIXED_OVERHEAD: usize = docx_member_overhead(19, DOCX_TYPES_XML.len())
    + docx_member_overhead(17, DOCX_DOC_XML.len())
    + docx_member_overhead(18, 0)
    + 22;

fn seeded_docx(size: usize, rng: &mut Rng) -> Result<Vec<u8>> {
    let min = DOCX_FIXED_OVERHEAD + 1;
    if size < min {
        return Err(Error::SizeTooSmall {
            requested: size,
            minimum: min,
        });
    }
    let pad = rng.bytes(size - DOCX_FIXED_OVERHEAD);
    let bytes = write_zip(
        &[
            ZipEntrySpec::stored(DOCX_CONTENT_TYPES, DOCX_TYPES_XML.to_vec()),
            ZipEntrySpec::stored(DOCX_DOCUMENT, DOCX_DOC_XML.to_vec()),
            ZipEntrySpec::stored(DOCX_PAD, pad),
        ],
        b"",
        rng,
    );
    debug_assert_eq!(bytes.len(), size);
    Ok(bytes)
}

/// Generates one payload of the requested type and size.
///
/// Sizes are honored exactly (and always within the +-64 byte container
/// tolerance); the structural minimum of each type is enforced. ZipCrypto
/// passwords are drawn from the supplied wordlist so a closed-loop
/// dictionary attack can recover them.
pub fn generate_payload(
    payload_type: PayloadType,
    size: usize,
    seed: u64,
    wordlist: &[String],
    mode: EmbedMode,
) -> Result<GeneratedPayload> {
    if size == 0 {
        return Err(Error::SizeTooSmall {
            requested: 0,
            minimum: 1,
        });
    }
    let mut rng = Rng::new(seed ^ 0x5747_u64.rotate_left(17));
    let (data, password) = match payload_type {
        PayloadType::Txt => (seeded_text(size, &mut rng), None),
        PayloadType::EncryptedTxt => (rng.bytes(size), None),
        PayloadType::Png => (seeded_png(size, &mut rng)?, None),
        PayloadType::Zip => (seeded_zip(size, None, &mut rng)?, None),
        PayloadType::ZipEncrypted => {
            if wordlist.is_empty() {
                return Err(Error::InvalidInput(
                    "zip_encrypted payloads need a non-empty wordlist".into(),
                ));
            }
            let password = wordlist[rng.below(wordlist.len() as u64) as usize].clone();
            let bytes = seeded_zip(size, Some(&password), &mut rng)?;
            (bytes, Some(password))
        }
        PayloadType::Docx => (seeded_docx(size, &mut rng)?, None),
    };
    Ok(GeneratedPayload {
        spec: PayloadSpec::new(data, payload_type.declared_kind(), mode)?,
        payload_type,
        zip_password: password,
    })
}
