#pragma once

#include <string>
#include <string_view>

namespace clonevet::java {

/// Removes every line and block comment, keeping all other bytes in order.
/// Propagates LexError for unlexable input.
std::string strip_comments(std::string_view source);

/// Removes space, tab, CR, LF and FF characters everywhere, including inside
/// string literals.
std::string normalize_layout(std::string_view source);

/// normalize_layout(strip_comments(source)): the text hashed for Type I.
std::string type1_normal_form(std::string_view source);

}  // namespace clonevet::java
