namespace sill {
} // namespace sill
