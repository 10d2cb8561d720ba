#pragma once

#include <map>
#include <optional>
#include <string>

namespace sop {

/// Read-replace-only key/value store. Writing an existing key replaces
/// its value; nothing is ever deleted during a run.
class Memory {
public:
    void set(const std::string& key, std::string value) {
        entries_[key] = std::move(value);
    }

    std::optional<std::string> get(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace sop
