pub mod cover;
pub mod oracle;
