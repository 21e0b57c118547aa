#ifndef TPAT_PARAMS_HPP_
#define TPAT_PARAMS_HPP_

#include <map>
#include <string>

#include "tpat/tensor.hpp"

namespace tpat {

// Flat container of named tensors. Binary layout (little-endian):
//   magic "TPP1", u32 count, then per entry:
//   u32 name_len, name bytes, u32 ndim, u32 extents..., f32 data.
// save_manifest writes a text listing of names and shapes next to it.
class ParamStore {
public:
    void put(const std::string& name, Tensor t);
    const Tensor& get(const std::string& name) const;
    bool contains(const std::string& name) const;
    size_t size() const { return entries_.size(); }
    const std::map<std::string, Tensor>& entries() const { return entries_; }

    void save(const std::string& path) const;
    static ParamStore load(const std::string& path);
    void save_manifest(const std::string& path) const;

private:
    std::map<std::string, Tensor> entries_;
};

}  // namespace tpat

#endif  // TPAT_PARAMS_HPP_
